//! Command line surface for `vmvt`: argument parsing, dispatch, reports and
//! the self-check suite.

pub mod audit;
pub mod commands;
pub mod report;

use std::time::Instant;

use commands::{Cli, Global};

/// Run one parsed invocation in the current thread pool.
pub fn execute(cli: &Cli) -> (String, i32) {
    let t = Instant::now();
    let outcome = commands::run(&cli.cmd, &cli.global);
    report::render(&cli.cmd, &cli.global, outcome, t.elapsed())
}

/// Run under a dedicated pool when `--threads` is given.
pub fn execute_with_threads(cli: &Cli) -> (String, i32) {
    match threads_of(&cli.global) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => (format!("error: cannot build thread pool: {e}\n"), commands::EXIT_RESOURCE),
        },
        None => execute(cli),
    }
}

fn threads_of(g: &Global) -> Option<usize> {
    g.threads.filter(|&n| n > 0)
}
