//! The ten acceptance criteria, one PASS/FAIL line each.

use std::any::Any;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

mod axioms;
mod harness;
mod oracles;
mod statistics;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn panic_text(e: &(dyn Any + Send)) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}

type Check = Box<dyn FnOnce(&mut statistics::Shared) -> Verdict>;

fn main() -> ExitCode {
    let mut stats = statistics::Shared::default();
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence", Box::new(|_| oracles::equivalence())),
        ("compliance table", Box::new(|_| axioms::table_one())),
        (
            "counterexample fixtures",
            Box::new(|_| axioms::counterexample_fixtures()),
        ),
        (
            "Condorcet consistency",
            Box::new(|_| axioms::condorcet_consistency()),
        ),
        ("random baseline", Box::new(statistics::random_baseline)),
        (
            "jury synergy and quorum",
            Box::new(statistics::jury_and_quorum),
        ),
        ("robustness shape", Box::new(statistics::robustness)),
        ("metric identities", Box::new(statistics::metric_identities)),
        ("determinism", Box::new(|_| harness::determinism())),
        ("validity filtering", Box::new(|_| harness::validity())),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = panic::catch_unwind(AssertUnwindSafe(|| check(&mut stats)))
            .unwrap_or_else(|e| Verdict::new(false, format!("panicked: {}", panic_text(&*e))));
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name}: {} [{:.1}s]",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
