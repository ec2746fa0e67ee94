//! Detection of relational questions whose relation does no work.

use super::exec::execute_relaxed;
use super::oracle::brute_force_relaxed;
use super::{Outcome, Program, ProgramError};
use crate::scene::Scene;

/// True iff dropping the constraint of some relate/same node leaves the
/// answer unchanged. Ill-posed questions are reported as not degenerate.
pub fn check_degenerate(program: &Program, scene: &Scene) -> Result<bool, ProgramError> {
    degenerate_by(program, |relax| execute_relaxed(program, scene, relax))
}

/// [`check_degenerate`] evaluated with the brute-force oracle.
pub fn check_degenerate_brute_force(
    program: &Program,
    scene: &Scene,
) -> Result<bool, ProgramError> {
    degenerate_by(program, |relax| brute_force_relaxed(program, scene, relax))
}

fn degenerate_by(
    program: &Program,
    eval: impl Fn(Option<usize>) -> Result<Outcome, ProgramError>,
) -> Result<bool, ProgramError> {
    let base = match eval(None)? {
        Outcome::Answer(a) => a,
        Outcome::IllPosed => return Ok(false),
    };
    for (i, node) in program.nodes.iter().enumerate() {
        if node.kind.is_relational() && eval(Some(i))? == Outcome::Answer(base) {
            return Ok(true);
        }
    }
    Ok(false)
}
