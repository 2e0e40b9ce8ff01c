//! Degree-of-cooperation matrices: how much of each other player's cost a
//! player mixes into their own objective.

use crate::error::{Error, Result};

const SIMPLEX_TOL: f64 = 1e-12;

/// Row-stochastic weight matrix. `row(i)[k]` is the weight player `i` puts on
/// player `k`'s cost; every row is non-negative and sums to one. A selfish
/// player's row is a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DocMatrix {
    rows: Vec<Vec<f64>>,
}

impl DocMatrix {
    /// Identity matrix: everyone minimizes their own cost.
    pub fn selfish(players: usize) -> Self {
        let rows = (0..players)
            .map(|i| {
                let mut row = vec![0.0; players];
                row[i] = 1.0;
                row
            })
            .collect();
        DocMatrix { rows }
    }

    /// Every player weighs all players (self included) by `1 / n`.
    pub fn equally_cooperative(players: usize) -> Self {
        let w = 1.0 / players as f64;
        DocMatrix {
            rows: vec![vec![w; players]; players],
        }
    }

    /// Player `player` commits total weight `beta` to the other players,
    /// spread uniformly; everyone else stays selfish. `beta = 1` is full
    /// altruism (zero weight on the own cost).
    pub fn unilateral(players: usize, player: usize, beta: f64) -> Result<Self> {
        if player >= players {
            return Err(Error::InvalidParameter(format!(
                "player index {player} out of range for {players} players"
            )));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "altruism weight beta must lie in (0, 1], got {beta}"
            )));
        }
        let mut doc = DocMatrix::selfish(players);
        let share = beta / (players - 1) as f64;
        for k in 0..players {
            doc.rows[player][k] = if k == player { 1.0 - beta } else { share };
        }
        Ok(doc)
    }

    /// Like [`DocMatrix::unilateral`], but parameterized by the weight put on
    /// each individual opponent; the total committed weight is
    /// `(n - 1) * weight`. For two players the two parameterizations agree.
    pub fn unilateral_per_opponent(players: usize, player: usize, weight: f64) -> Result<Self> {
        let max = 1.0 / (players - 1) as f64;
        if !(weight > 0.0 && weight <= max + SIMPLEX_TOL) {
            return Err(Error::InvalidParameter(format!(
                "per-opponent weight must lie in (0, {max}], got {weight}"
            )));
        }
        DocMatrix::unilateral(players, player, (weight * (players - 1) as f64).min(1.0))
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            if let Some(&w) = row.iter().find(|&&w| w < -SIMPLEX_TOL) {
                return Err(Error::DocRow {
                    row: i,
                    detail: format!("negative weight {w}"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::DocRow {
                    row: i,
                    detail: format!("weights sum to {sum}, need 1"),
                });
            }
        }
        Ok(DocMatrix { rows })
    }

    pub fn players(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn is_selfish(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(k, &w)| w == if k == i { 1.0 } else { 0.0 })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selfish_rows_are_unit_vectors() {
        let doc = DocMatrix::selfish(3);
        assert!(doc.is_selfish());
        assert_eq!(doc.row(1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn unilateral_row_stays_on_the_simplex() {
        let doc = DocMatrix::unilateral(3, 0, 0.9).unwrap();
        let row = doc.row(0);
        assert!((row[0] - 0.1).abs() < 1e-15);
        assert!((row[1] - 0.45).abs() < 1e-15);
        assert!((row[2] - 0.45).abs() < 1e-15);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(doc.row(1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn fully_altruistic_zeroes_the_own_weight() {
        let doc = DocMatrix::unilateral(2, 0, 1.0).unwrap();
        assert_eq!(doc.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn per_opponent_weight_scales_with_player_count() {
        let doc = DocMatrix::unilateral_per_opponent(5, 2, 0.2).unwrap();
        assert!((doc.row(2)[2] - 0.2).abs() < 1e-15);
        for k in [0, 1, 3, 4] {
            assert!((doc.row(2)[k] - 0.2).abs() < 1e-15);
        }
        assert!(DocMatrix::unilateral_per_opponent(5, 2, 0.3).is_err());
    }

    #[test]
    fn off_simplex_rows_are_rejected() {
        assert!(matches!(
            DocMatrix::from_rows(vec![vec![0.5, 0.4], vec![0.0, 1.0]]),
            Err(Error::DocRow { row: 0, .. })
        ));
        assert!(matches!(
            DocMatrix::from_rows(vec![vec![1.2, -0.2], vec![0.0, 1.0]]),
            Err(Error::DocRow { row: 0, .. })
        ));
    }
}
