//! Scenario runner for the agcal engine.
//!
//! A scenario is parsed and fully validated by [`scenario::parse_scenario`],
//! executed by [`run_scenario`] and rendered by [`report::Report::emit`].

pub mod command;
pub mod laws;
pub mod report;
pub mod scenario;

use agcal_core::index_core::GridConfig;
use report::{CommandResult, Report};
use scenario::{CommandSpec, Scenario};

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Replaces every other grid setting.
    pub grid: Option<GridConfig>,
    pub parallel: bool,
}

fn run_one(i: usize, c: &CommandSpec, scenario_grid: Option<GridConfig>, opts: &RunOptions) -> CommandResult {
    let grid = opts
        .grid
        .or(c.command.grid)
        .or(scenario_grid)
        .unwrap_or_else(|| c.command.default_grid());
    let outcome = c.command.execute(&grid);
    CommandResult::new(i + 1, &c.id, &c.command, grid, outcome)
}

/// Executes every command. Results come back in declaration order whether
/// or not the commands ran in parallel.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Report {
    let results = if opts.parallel && s.commands.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = s
                .commands
                .iter()
                .enumerate()
                .map(|(i, c)| scope.spawn(move || run_one(i, c, s.grid, opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("command thread panicked"))
                .collect()
        })
    } else {
        s.commands
            .iter()
            .enumerate()
            .map(|(i, c)| run_one(i, c, s.grid, opts))
            .collect()
    };
    Report::new(s, opts.grid, results)
}

/// Parses, validates and runs scenario text.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<Report, scenario::ScenarioError> {
    let s = scenario::parse_scenario(text)?;
    Ok(run_scenario(&s, opts))
}
