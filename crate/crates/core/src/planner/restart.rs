use crate::error::Result;
use crate::shortcut::{shortcut, ShortcutBudget};
use crate::space::RandomStream;
use crate::world::Scenario;

use super::connect::connect_until_solved;
use super::{plan, PlanResult, PlannerConfig, PlannerKind, RunClock, Termination};

/// Seed of restart `k` under master seed `master` (splitmix64 of the pair).
pub fn restart_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn run_rrt_connect_s(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    mut clock: RunClock<'_>,
) -> PlanResult {
    let mut rng = RandomStream::from_seed(cfg.seed);
    let Some(path) = connect_until_solved(scenario, cfg.range, &mut rng, &mut clock, false) else {
        return clock.finish(None, 0);
    };
    clock.observe(path.length(), 0);
    let budget = ShortcutBudget::for_path(cfg.scf, path.len()).expect("validated scf");
    let path = shortcut(&path, scenario, &budget, &mut rng);
    clock.observe(path.length(), 1);
    clock.finish(Some(path), 1)
}

/// Restart RRTConnect + shortcut until termination and keep the shortest
/// result. A restart cut off by the budget is discarded.
pub(crate) fn run_m_rrt_connect_s(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    mut clock: RunClock<'_>,
) -> PlanResult {
    let mut best = None;
    let mut best_len = f64::INFINITY;
    let mut restarts = 0u64;
    loop {
        let mut rng = RandomStream::from_seed(restart_seed(cfg.seed, restarts));
        let Some(path) =
            connect_until_solved(scenario, cfg.range, &mut rng, &mut clock, best.is_some())
        else {
            break;
        };
        let budget = ShortcutBudget::for_path(cfg.scf, path.len()).expect("validated scf");
        let path = shortcut(&path, scenario, &budget, &mut rng);
        restarts += 1;
        if path.length() < best_len {
            best_len = path.length();
            best = Some(path);
        }
        clock.observe(best_len, restarts);
        if !clock.should_continue(best.is_some()) {
            break;
        }
    }
    clock.finish(best, restarts)
}

/// One RRTConnect run followed by shortcutting.
pub fn rrt_connect_s(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
) -> Result<PlanResult> {
    plan(PlannerKind::RrtConnectS, scenario, cfg, termination)
}

/// Multiple restarts of RRTConnect with shortcutting, best path kept.
pub fn m_rrt_connect_s(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
) -> Result<PlanResult> {
    plan(PlannerKind::MRrtConnectS, scenario, cfg, termination)
}
