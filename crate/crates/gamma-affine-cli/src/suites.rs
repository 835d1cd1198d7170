//! Suite orchestration: each suite bundles the checks that make sense for a
//! presentation, and results land in a deterministic, diffable report.

use std::rc::Rc;
use std::time::Instant;

use gamma_affine_core::affine::Affinization;
use gamma_affine_core::conformal::{
    affine_conformal, loop_affine_compare, orbit_loop_check, LoopAlgebra,
};
use gamma_affine_core::fields::verify_commutator_formula;
use gamma_affine_core::lie::Presentation;
use gamma_affine_core::report::{Report, Status};
use gamma_affine_core::vacuum::TruncatedModule;

use crate::config::SessionConfig;

pub const SUITES: &[&str] = &[
    "lie-axioms",
    "fixed-point",
    "affine",
    "quotient",
    "vacuum",
    "commutator",
    "conformal",
];

pub struct VerificationReport {
    pub config_name: String,
    pub suite: String,
    pub echo: Vec<String>,
    pub report: Report,
    pub millis: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    /// One record per line as key=value pairs, preceded by the config echo.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# config={} suite={}\n", self.config_name, self.suite));
        for line in &self.echo {
            out.push_str(&format!("# {}\n", line));
        }
        for r in &self.report.records {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skipped => "skip",
            };
            out.push_str(&format!("check=\"{}\" status={}", r.name, status));
            if let Some(w) = &r.window {
                out.push_str(&format!(" window=\"{}\"", w));
            }
            if let Some(w) = &r.witness {
                out.push_str(&format!(" witness=\"{}\"", w));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "summary pass={} fail={} skip={} time_ms={}\n",
            self.report.count(Status::Pass),
            self.report.count(Status::Fail),
            self.report.count(Status::Skipped),
            self.millis
        ));
        out
    }
}

fn generator_labels(pres: &Presentation) -> Vec<usize> {
    match pres {
        Presentation::Finite(p) => (0..p.dim()).collect(),
        Presentation::FreeOrbit(p) => p.check_gens.clone(),
    }
}

fn run_checks(cfg: &SessionConfig, suite: &str) -> Result<Report, String> {
    let mut rep = Report::new();
    match suite {
        "lie-axioms" => {
            let pres = cfg.pres.as_ref().ok_or("suite needs a Lie presentation")?;
            rep.merge(pres.check_axioms());
        }
        "fixed-point" => {
            let pres = cfg.pres.as_ref().ok_or("suite needs a Lie presentation")?;
            rep.merge(pres.psi_fixed_point_check());
            match pres {
                Presentation::Finite(_) => {
                    let alg = Affinization::new(pres.clone());
                    rep.merge(alg.fixed_point_compare(cfg.window));
                }
                Presentation::FreeOrbit(_) => {
                    rep.skip("affine fixed-point comparison", "free-orbit shape");
                }
            }
        }
        "affine" => {
            let pres = cfg.pres.as_ref().ok_or("suite needs a Lie presentation")?;
            let alg = Affinization::new(pres.clone());
            rep.merge(alg.jacobi_window_check(cfg.window));
        }
        "quotient" => {
            let pres = cfg.pres.as_ref().ok_or("suite needs a Lie presentation")?;
            let alg = Affinization::new(pres.clone());
            rep.merge(alg.quotient_iso_check(cfg.window));
        }
        "vacuum" => {
            let pres = cfg.pres.as_ref().ok_or("suite needs a Lie presentation")?;
            let alg = Rc::new(Affinization::new(pres.clone()));
            let module = TruncatedModule::new(alg, cfg.depth, cfg.level.clone());
            rep.merge(module.check_module_relations(cfg.modes));
        }
        "commutator" => {
            let pres = cfg.pres.as_ref().ok_or("suite needs a Lie presentation")?;
            let alg = Rc::new(Affinization::new(pres.clone()));
            let module = Rc::new(TruncatedModule::new(alg, cfg.depth, cfg.level.clone()));
            let gens = generator_labels(pres);
            for u in &gens {
                for v in &gens {
                    rep.merge(verify_commutator_formula(&module, *u, *v, cfg.modes));
                }
            }
        }
        "conformal" => {
            if let Some(conf) = &cfg.conformal {
                rep.merge(conf.check_conformal_axioms(cfg.window.max(3)));
                if conf.character.group.ngens() > 0 {
                    rep.merge(conf.check_gamma_conformal_axioms());
                }
                let la = LoopAlgebra::new(conf.clone());
                rep.merge(la.jacobi_window_check(cfg.window.min(3)));
            } else {
                let pres = cfg.pres.as_ref().ok_or("suite needs a presentation")?;
                match pres {
                    Presentation::Finite(p) => {
                        let conf = affine_conformal(p)?;
                        rep.merge(conf.check_conformal_axioms(3));
                        if conf.character.group.ngens() > 0 {
                            rep.merge(conf.check_gamma_conformal_axioms());
                        }
                        let la = LoopAlgebra::new(conf);
                        let alg = Affinization::new(pres.clone());
                        rep.merge(loop_affine_compare(&la, &alg, cfg.window));
                    }
                    Presentation::FreeOrbit(_) => {
                        let alg = Affinization::new(pres.clone());
                        rep.merge(orbit_loop_check(&alg, cfg.window, 2));
                    }
                }
            }
        }
        other => return Err(format!("unknown suite `{}`", other)),
    }
    Ok(rep)
}

pub fn run_suite(cfg: &SessionConfig, suite: &str) -> Result<VerificationReport, String> {
    let start = Instant::now();
    let report = run_checks(cfg, suite)?;
    Ok(VerificationReport {
        config_name: cfg.name.clone(),
        suite: suite.to_string(),
        echo: cfg.echo.clone(),
        report,
        millis: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use gamma_affine_core::report::Status;

    fn bundled(name: &str) -> crate::config::SessionConfig {
        let path = format!("{}/../../configs/{}.cfg", env!("CARGO_MANIFEST_DIR"), name);
        let text = std::fs::read_to_string(path).unwrap();
        parse_config(name, &text).unwrap()
    }

    #[test]
    fn heisenberg_affine_suite_passes() {
        let vr = run_suite(&bundled("heisenberg1"), "affine").unwrap();
        assert!(vr.passed(), "{}", vr.render());
    }

    #[test]
    fn sl2_fixed_point_suite_passes() {
        let vr = run_suite(&bundled("sl2_chevalley"), "fixed-point").unwrap();
        assert!(vr.passed(), "{}", vr.render());
    }

    #[test]
    fn corrupted_sl2_fails_with_witness() {
        let vr = run_suite(&bundled("sl2_corrupted"), "lie-axioms").unwrap();
        assert!(!vr.passed());
        let bad = vr
            .report
            .records
            .iter()
            .find(|r| r.status == Status::Fail)
            .unwrap();
        assert!(bad.witness.is_some());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite(&bundled("heisenberg1"), "nope").is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = bundled("sl2_chevalley");
        let strip = |s: String| -> String {
            s.lines().filter(|l| !l.starts_with("summary")).collect::<Vec<_>>().join("\n")
        };
        let a = strip(run_suite(&cfg, "affine").unwrap().render());
        let b = strip(run_suite(&cfg, "affine").unwrap().render());
        assert_eq!(a, b);
    }
}
