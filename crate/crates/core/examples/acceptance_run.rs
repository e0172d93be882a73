//! Every acceptance criterion, one line each.

use eulercx::acceptance::{run_suite, suite_verdict, SuiteConfig};

fn main() {
    let res = run_suite(&SuiteConfig { jobs: 4, ..Default::default() });
    for r in &res {
        println!("{}", r.line());
    }
    println!("verdict: {:?}", suite_verdict(&res));
}
