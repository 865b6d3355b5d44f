//! Running the verification suite and listing what it found.

use kmln::verify::{run_suite, SuiteConfig};

fn main() {
    let cfg = SuiteConfig {
        samples: 50,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg);
    println!("{}", report.summary());
    for r in report.discrepancies() {
        println!(
            "{:<6} published rank {}, observed {}",
            r.subject.as_deref().unwrap_or(""),
            r.claimed_rank.unwrap(),
            r.observed_rank.unwrap()
        );
    }
    for r in report.failures() {
        println!("FAILED {} {:?}: {:?}", r.check, r.subject, r.note);
    }
}
