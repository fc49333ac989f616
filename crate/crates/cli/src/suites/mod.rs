//! The verification suites. Each suite returns its check records in a fixed
//! order; random samples come from per-index substreams of the seed so the
//! records do not depend on the thread count.

mod cheeger;
mod cmc;
mod comass;
mod graph;
mod identities;
mod isoperimetric;
mod quat;
mod special;

use crate::config::SuiteConfig;
use calib_core::report::{CheckRecord, Report};
use calib_core::Result;

pub const SUITES: [&str; 10] = [
    "identities-flat",
    "identities-curved",
    "isoperimetric",
    "graph-sec51",
    "kahler-sec53",
    "quat-sec54",
    "special-sec55",
    "cheeger-sec4",
    "cmc-hyperbolic",
    "comass-catalog",
];

/// Record builder bound to a suite and its tolerance overrides.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a SuiteConfig,
    pub records: Vec<CheckRecord>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a SuiteConfig) -> Self {
        Self { cfg, records: Vec::new() }
    }

    fn suite(&self) -> &str {
        &self.cfg.suite
    }

    pub fn tol(&self, id: &str, default: f64) -> f64 {
        self.cfg.tolerance(id, default)
    }

    pub fn equality(&mut self, id: &str, anchor: &str, lhs: f64, rhs: f64, tol: f64) {
        let r = CheckRecord::equality(self.suite(), id, anchor, lhs, rhs, self.tol(id, tol));
        self.records.push(r);
    }

    pub fn relative(&mut self, id: &str, anchor: &str, lhs: f64, rhs: f64, floor: f64, tol: f64) {
        let r = CheckRecord::relative(self.suite(), id, anchor, lhs, rhs, floor, self.tol(id, tol));
        self.records.push(r);
    }

    pub fn upper_bound(&mut self, id: &str, anchor: &str, lhs: f64, rhs: f64, tol: f64) {
        let r = CheckRecord::upper_bound(self.suite(), id, anchor, lhs, rhs, self.tol(id, tol));
        self.records.push(r);
    }

    pub fn small(&mut self, id: &str, anchor: &str, value: f64, tol: f64) {
        let r = CheckRecord::small(self.suite(), id, anchor, value, self.tol(id, tol));
        self.records.push(r);
    }

    /// A record whose residual is computed by the caller.
    pub fn custom(&mut self, id: &str, anchor: &str, lhs: f64, rhs: f64, residual: f64, tol: f64) {
        let tol = self.tol(id, tol);
        self.records.push(CheckRecord {
            suite: self.suite().into(),
            check_id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        });
    }

    /// A boolean condition recorded as `lhs = 1` against `rhs = 1`.
    pub fn holds(&mut self, id: &str, anchor: &str, ok: bool) {
        let v = if ok { 1.0 } else { 0.0 };
        let r = CheckRecord::equality(self.suite(), id, anchor, v, 1.0, self.tol(id, 0.0));
        self.records.push(r);
    }

    pub fn samples(&self, default: usize) -> usize {
        self.cfg.samples_or(default)
    }
}

/// Index of the sample with the largest `key`, first on ties.
pub(crate) fn argmax<T>(items: &[T], key: impl Fn(&T) -> f64) -> usize {
    let mut best = 0;
    for (i, it) in items.iter().enumerate() {
        if key(it) > key(&items[best]) || key(it).is_nan() {
            best = i;
            if key(it).is_nan() {
                break;
            }
        }
    }
    best
}

/// Runs the configured suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut ctx = Ctx::new(cfg);
    match cfg.suite.as_str() {
        "identities-flat" => identities::flat(&mut ctx)?,
        "identities-curved" => identities::curved(&mut ctx)?,
        "isoperimetric" => isoperimetric::run(&mut ctx)?,
        "graph-sec51" => graph::graph(&mut ctx)?,
        "kahler-sec53" => graph::kahler(&mut ctx)?,
        "quat-sec54" => quat::run(&mut ctx)?,
        "special-sec55" => special::run(&mut ctx)?,
        "cheeger-sec4" => cheeger::run(&mut ctx)?,
        "cmc-hyperbolic" => cmc::run(&mut ctx)?,
        "comass-catalog" => comass::run(&mut ctx)?,
        other => return Err(calib_core::Error::Invalid(format!("unknown suite '{other}'"))),
    }
    Ok(Report::new(&cfg.suite, cfg.seed, ctx.records))
}
