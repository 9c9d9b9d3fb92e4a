//! Fixed games used as counterexamples and as the worked example.
//!
//! Except for the worked example, every constructor sets each principal's
//! utility equal to its agent's (perfect individual alignment).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::game::{DelegationGame, UtilityVector};

fn from_tables(counts: Vec<usize>, tables: [Vec<f64>; 2]) -> DelegationGame {
    let [a, b] = tables;
    DelegationGame::with_identical_principals(counts, vec![UtilityVector(a), UtilityVector(b)])
        .expect("constructed tables are well-formed")
}

/// Two vehicles choosing between an autobahn (A) and a beachfront road (B).
///
/// Agents receive 6 or 2 for A or B, minus 3 or 2 when both pick the same
/// road; the principals weigh the routes differently.
pub fn make_worked_example() -> DelegationGame {
    // outcome order: (A,A), (A,B), (B,A), (B,B)
    DelegationGame::new(
        vec![2, 2],
        vec![
            UtilityVector(vec![3.0, 6.0, 2.0, 0.0]),
            UtilityVector(vec![3.0, 2.0, 6.0, 0.0]),
        ],
        vec![
            UtilityVector(vec![2.0, 3.0, 4.0, 3.0]),
            UtilityVector(vec![3.0, 3.0, 6.0, 0.0]),
        ],
    )
    .expect("worked example is well-formed")
}

/// Prisoner's Dilemma scaled so that ideal welfare is 1 and pessimal welfare 0.
///
/// Mutual cooperation (A,A) pays `1 - x/2` each; mutual defection (B,B), the
/// unique equilibrium, pays `x/2` each.
pub fn make_prisoners_dilemma(x: f64) -> Result<DelegationGame> {
    if !(x > 0.0 && x < 1.0) {
        return Err(invalid(format!("x = {x} must lie in (0, 1)")));
    }
    let c = 1.0 - x / 2.0;
    let d = x / 2.0;
    Ok(from_tables(vec![2, 2], [vec![c, 0.0, 1.0, d], vec![c, 1.0, 0.0, d]]))
}

/// Traveller's Dilemma with `k` actions per player and `x = 1/(k+1)`.
///
/// Completion rule for the table: on the diagonal both players get
/// `1 - (j+1)x`; when one player plays `j` and the other undercuts with
/// `j+1`, the undercutter gets `1 - jx` and the other `1 - (j+3)x`; every
/// other entry is 0. Each player's best reply to `j` is `j+1`, so the only
/// equilibrium is mutual play of the last action, paying `x` each.
pub fn make_travellers_dilemma(k: usize) -> Result<DelegationGame> {
    if k < 2 {
        return Err(invalid(format!("k = {k} must be at least 2")));
    }
    let x = 1.0 / (k as f64 + 1.0);
    let mut row = vec![0.0; k * k];
    let mut col = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let (r, c) = if i == j {
                let v = 1.0 - (i as f64 + 1.0) * x;
                (v, v)
            } else if j == i + 1 {
                (1.0 - (i as f64 + 3.0) * x, 1.0 - i as f64 * x)
            } else if i == j + 1 {
                (1.0 - j as f64 * x, 1.0 - (j as f64 + 3.0) * x)
            } else {
                (0.0, 0.0)
            };
            row[i * k + j] = r;
            col[i * k + j] = c;
        }
    }
    Ok(from_tables(vec![k, k], [row, col]))
}

/// A 3×3 game whose only equilibrium (A,A) is ideal, while (B,B) is an
/// ε-equilibrium paying only `(1-εⁱ)x`.
pub fn make_fragile_game(e1: f64, e2: f64, x: f64) -> Result<DelegationGame> {
    for (name, v) in [("e1", e1), ("e2", e2), ("x", x)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(format!("{name} = {v} must lie in (0, 1)")));
        }
    }
    #[rustfmt::skip]
    let row = vec![
        1.0,      x,              0.0,
        1.0 - e1, (1.0 - e1) * x, x,
        0.0,      0.0,            0.0,
    ];
    #[rustfmt::skip]
    let col = vec![
        1.0, 1.0 - e2,       0.0,
        x,   (1.0 - e2) * x, 0.0,
        0.0, x,              0.0,
    ];
    Ok(from_tables(vec![3, 3], [row, col]))
}
