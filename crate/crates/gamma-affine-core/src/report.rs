//! Machine-readable verification reports: one record per check, with a
//! pass/fail/skipped status, the window actually used, and a witness on
//! failure. Rendering is one `key=value` record per line so reports diff
//! cleanly.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub window: Option<String>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Self {
        Report { records: vec![] }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.records.push(CheckRecord {
            name: name.into(),
            status: Status::Pass,
            window: None,
            witness: None,
        });
    }

    pub fn pass_windowed(&mut self, name: impl Into<String>, window: impl Into<String>) {
        self.records.push(CheckRecord {
            name: name.into(),
            status: Status::Pass,
            window: Some(window.into()),
            witness: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.records.push(CheckRecord {
            name: name.into(),
            status: Status::Fail,
            window: None,
            witness: Some(witness.into()),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, why: impl Into<String>) {
        self.records.push(CheckRecord {
            name: name.into(),
            status: Status::Skipped,
            window: None,
            witness: Some(why.into()),
        });
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl Into<String>) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness);
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skipped => "skipped",
            };
            out.push_str(&format!("check={} status={}", r.name, status));
            if let Some(w) = &r.window {
                out.push_str(&format!(" window={}", w));
            }
            if let Some(w) = &r.witness {
                out.push_str(&format!(" witness={:?}", w));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "summary pass={} fail={} skipped={}\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        ));
        out
    }
}
