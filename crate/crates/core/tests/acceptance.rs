//! Runs every acceptance criterion, printing one pass/fail line each, and
//! fails if any criterion fails.

use torpedo::verification::all_criteria;

#[test]
fn acceptance_criteria() {
    let reports = all_criteria();
    for r in &reports {
        println!("{}", r.summary());
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    println!("{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
