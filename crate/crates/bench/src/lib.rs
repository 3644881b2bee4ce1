//! Inputs shared by the benchmarks.

use logicgrid_core::{bundled_dataset, GradePair, Puzzle};

pub const FIRST_OUTPUT: &str = include_str!("../../core/fixtures/ostrich_session/first_output.txt");
pub const SECOND_OUTPUT: &str = include_str!("../../core/fixtures/ostrich_session/second_output.txt");
pub const SECOND_SCRIPT: &str = include_str!("../../core/fixtures/ostrich_session/second_script.smt2");

pub fn puzzle(id: &str) -> Puzzle {
    bundled_dataset().into_iter().find(|p| p.id == id).expect("bundled puzzle")
}

/// An agent reply wrapping the corrected ostrich script in prose and a fence.
pub fn agent_reply() -> String {
    format!("The errors came from prose lines. Here is the fixed version:\n\n```smt2\n{SECOND_SCRIPT}```\n\nThis should now be sat.")
}

/// `n` grade pairs on a twelfth-step grid, from a small linear congruential
/// sequence so every run sees the same data.
pub fn grade_pairs(n: usize) -> Vec<GradePair> {
    let mut state: u64 = 0x2545_f491;
    let mut next = || {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        ((state >> 33) % 13) as f64 / 12.0
    };
    (0..n).map(|i| GradePair { id: format!("p{i}"), auto: next(), human: next() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_usable() {
        assert!(logicgrid_core::extract_smt(&agent_reply()).is_ok());
        let pairs = grade_pairs(50);
        assert!(pairs.iter().all(|p| (0.0..=1.0).contains(&p.auto) && (0.0..=1.0).contains(&p.human)));
        assert!(logicgrid_core::compute_stats(&pairs).is_ok());
        assert_eq!(puzzle("houses").id, "houses");
    }
}
