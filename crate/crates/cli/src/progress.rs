//! Record-count progress lines on stderr.

pub struct Progress {
    every: u64,
    count: u64,
    quiet: bool,
    what: &'static str,
}

impl Progress {
    pub fn new(every: u64, quiet: bool, what: &'static str) -> Self {
        Progress {
            every: every.max(1),
            count: 0,
            quiet,
            what,
        }
    }

    pub fn tick(&mut self) {
        self.count += 1;
        if !self.quiet && self.count % self.every == 0 {
            eprintln!("{} {} records", self.what, self.count);
        }
    }

    pub fn finish(&self) {
        if !self.quiet {
            eprintln!("{} {} records total", self.what, self.count);
        }
    }
}
