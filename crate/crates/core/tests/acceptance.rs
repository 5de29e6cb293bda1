use std::process::ExitCode;

use cleaved::checks;

fn main() -> ExitCode {
    let seed = checks::seed();
    println!("acceptance (seed {seed})");
    let results = checks::all(seed);
    for c in &results {
        println!("{}", c.line());
    }
    let passed = results.iter().filter(|c| c.passed()).count();
    let blocking = results.iter().filter(|c| c.blocking()).count();
    println!("{passed}/{} criteria pass, {blocking} unexpected failures", results.len());
    if blocking == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
