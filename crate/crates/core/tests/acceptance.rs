use std::process::ExitCode;
use std::time::Instant;

use cfcalc::suites::{run_plan, FieldChoice, Params, Status, SUITES};

const CAP: usize = 500_000;

fn main() -> ExitCode {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v != "0" && !v.is_empty());
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let field = FieldChoice::Prime(32003);
    let base = Params { seed: 1, cap: CAP, ..Params::default() };
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, what)) in SUITES.iter().enumerate() {
        let t = Instant::now();
        let report = run_plan(field, &[(i, base.clone())], &base, false, jobs);
        let s = &report.summary;
        let verdict = if s.fail == 0 { "PASS" } else { "FAIL" };
        failed += usize::from(s.fail > 0);
        println!(
            "criterion {:>2} {name:<20} {verdict}  ({} pass, {} fail, {} skipped; exact; {:.1}s)  {what}",
            i + 1,
            s.pass,
            s.fail,
            s.skipped,
            t.elapsed().as_secs_f64()
        );
        for c in report.checks.iter().filter(|c| c.status != Status::Pass) {
            let tag = if c.status == Status::Fail { "fail" } else { "skip" };
            let tables: Vec<String> = c.tables.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            println!("    {tag}: {}  {}  {}", c.check, tables.join("; "), c.detail.as_deref().unwrap_or(""));
        }
    }
    println!("{} of {} criteria pass ({:.1}s)", SUITES.len() - failed, SUITES.len(), start.elapsed().as_secs_f64());
    if strict && failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
