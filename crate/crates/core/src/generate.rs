//! Random benchmark instances: quasigroup completion (QC) and quasigroup
//! with holes (QWH).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pls::{PlsError, PlsInstance, Triple};

/// Restarts allowed before QC generation gives up.
pub const QC_MAX_RESTARTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Qc,
    Qwh,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Qc => "qc",
            Scheme::Qwh => "qwh",
        })
    }
}

impl FromStr for Scheme {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qc" => Ok(Scheme::Qc),
            "qwh" => Ok(Scheme::Qwh),
            _ => Err(GenError::UnknownScheme(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenScheme {
    pub scheme: Scheme,
    pub ratio: f64,
    pub seed: u64,
}

impl GenScheme {
    pub fn generate(&self, n: usize) -> Result<PlsInstance, GenError> {
        match self.scheme {
            Scheme::Qc => generate_qc(n, self.ratio, self.seed),
            Scheme::Qwh => generate_qwh(n, self.ratio, self.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("pre-assignment ratio must lie in [0, 1], got {0}")]
    BadRatio(f64),
    #[error(transparent)]
    Pls(#[from] PlsError),
    #[error("QC generation reached a dead end {restarts} times before assigning {target} cells")]
    QcFailed { target: usize, restarts: usize },
    #[error("unknown generation scheme {0:?}; expected qc or qwh")]
    UnknownScheme(String),
}

/// `floor(n^2 * r)`, tolerant of ratios like 0.3 that are not exact in binary.
pub fn assigned_cells(n: usize, ratio: f64) -> usize {
    let exact = (n * n) as f64 * ratio;
    ((exact + 1e-9).floor() as usize).min(n * n)
}

fn check_args(n: usize, ratio: f64) -> Result<(), GenError> {
    if n < 2 {
        return Err(PlsError::GridTooSmall(n).into());
    }
    if n > 255 {
        return Err(PlsError::GridTooLarge(n).into());
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(GenError::BadRatio(ratio));
    }
    Ok(())
}

/// Cyclic square `l(i, j) = ((i + j - 2) mod n) + 1` relabelled by the given
/// row, column and symbol permutations (each a permutation of `0..n`).
pub fn permuted_cyclic_square(
    n: usize,
    rows: &[usize],
    cols: &[usize],
    symbols: &[usize],
) -> Vec<Triple> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let s = symbols[(i + j) % n];
            out.push(Triple::new(rows[i] as u16 + 1, cols[j] as u16 + 1, s as u16 + 1));
        }
    }
    out.sort();
    out
}

/// A complete Latin square of order `n`: the cyclic square under independent
/// uniformly random row, column and symbol permutations.
pub fn random_latin_square<R: Rng>(n: usize, rng: &mut R) -> Vec<Triple> {
    let mut perm = || {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    };
    let (rows, cols, symbols) = (perm(), perm(), perm());
    permuted_cyclic_square(n, &rows, &cols, &symbols)
}

/// QWH instance together with the complete square it was cut from.
pub fn generate_qwh_with_square(
    n: usize,
    ratio: f64,
    seed: u64,
) -> Result<(PlsInstance, Vec<Triple>), GenError> {
    check_args(n, ratio)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let square = random_latin_square(n, &mut rng);
    let keep = assigned_cells(n, ratio);
    let mut cells: Vec<usize> = (0..n * n).collect();
    cells.shuffle(&mut rng);
    let given = cells[..keep].iter().map(|&i| square[i]).collect();
    Ok((PlsInstance::new(n, given)?, square))
}

/// Removes `n^2 - floor(n^2 r)` random cells from a random Latin square.
/// The result always extends to a complete square.
pub fn generate_qwh(n: usize, ratio: f64, seed: u64) -> Result<PlsInstance, GenError> {
    generate_qwh_with_square(n, ratio, seed).map(|(inst, _)| inst)
}

/// Starting from the empty grid, repeatedly assigns a uniformly random
/// feasible (cell, symbol) pair until `floor(n^2 r)` cells are filled.
///
/// Dead ends restart from the empty grid with the same random stream, up to
/// [`QC_MAX_RESTARTS`] times.
pub fn generate_qc(n: usize, ratio: f64, seed: u64) -> Result<PlsInstance, GenError> {
    check_args(n, ratio)?;
    let target = assigned_cells(n, ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=QC_MAX_RESTARTS {
        if let Some(given) = qc_attempt(n, target, &mut rng) {
            return Ok(PlsInstance::new(n, given)?);
        }
    }
    Err(GenError::QcFailed {
        target,
        restarts: QC_MAX_RESTARTS,
    })
}

fn qc_attempt<R: Rng>(n: usize, target: usize, rng: &mut R) -> Option<Vec<Triple>> {
    let mut row_has = vec![false; n * n];
    let mut col_has = vec![false; n * n];
    // Empty cells, kept compact with swap_remove.
    let mut empty: Vec<usize> = (0..n * n).collect();
    let mut given = Vec::with_capacity(target);
    let feasible = |row_has: &[bool], col_has: &[bool], cell: usize, s: usize| {
        !row_has[(cell / n) * n + s] && !col_has[(cell % n) * n + s]
    };

    while given.len() < target {
        // Rejection sampling: each feasible (cell, symbol) pair is proposed
        // with the same probability, so accepted pairs are uniform.
        let mut picked = None;
        for _ in 0..64 {
            let slot = rng.gen_range(0..empty.len());
            let s = rng.gen_range(0..n);
            if feasible(&row_has, &col_has, empty[slot], s) {
                picked = Some((slot, s));
                break;
            }
        }
        if picked.is_none() {
            // Feasible pairs are scarce: enumerate them.
            let pairs: Vec<(usize, usize)> = empty
                .iter()
                .enumerate()
                .flat_map(|(slot, &cell)| (0..n).map(move |s| (slot, s, cell)))
                .filter(|&(_, s, cell)| feasible(&row_has, &col_has, cell, s))
                .map(|(slot, s, _)| (slot, s))
                .collect();
            if pairs.is_empty() {
                return None;
            }
            picked = Some(pairs[rng.gen_range(0..pairs.len())]);
        }
        let (slot, s) = picked.unwrap();
        let cell = empty.swap_remove(slot);
        let (r, c) = (cell / n, cell % n);
        row_has[r * n + s] = true;
        col_has[c * n + s] = true;
        given.push(Triple::new(r as u16 + 1, c as u16 + 1, s as u16 + 1));
    }
    Some(given)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::is_pls_set;

    #[test]
    fn cyclic_square_with_identity_permutations() {
        let id: Vec<usize> = (0..2).collect();
        let sq = permuted_cyclic_square(2, &id, &id, &id);
        assert_eq!(
            sq,
            vec![
                Triple::new(1, 1, 1),
                Triple::new(1, 2, 2),
                Triple::new(2, 1, 2),
                Triple::new(2, 2, 1)
            ]
        );
    }

    #[test]
    fn random_squares_are_latin() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..9 {
            let sq = random_latin_square(n, &mut rng);
            assert_eq!(sq.len(), n * n);
            assert!(is_pls_set(n, &sq).unwrap());
        }
        let sq = random_latin_square(3, &mut rng);
        for s in 1..=3 {
            assert_eq!(sq.iter().filter(|t| t.symbol == s).count(), 3);
        }
    }

    #[test]
    fn ratio_counts() {
        assert_eq!(generate_qc(2, 0.0, 1).unwrap().len(), 0);
        assert_eq!(generate_qc(40, 0.3, 1).unwrap().len(), 480);
        assert_eq!(generate_qwh(40, 0.5, 1).unwrap().len(), 800);
        assert_eq!(assigned_cells(40, 0.6), 960);
        assert_eq!(assigned_cells(40, 0.7), 1120);
        let full = generate_qwh(3, 1.0, 9).unwrap();
        assert!(full.is_complete());
    }

    #[test]
    fn qc_small_instance_is_pls() {
        let inst = generate_qc(5, 0.4, 123).unwrap();
        assert_eq!(inst.len(), 10);
        assert!(is_pls_set(5, inst.given()).unwrap());
    }

    #[test]
    fn qwh_is_subset_of_its_square() {
        let (inst, square) = generate_qwh_with_square(12, 0.45, 3).unwrap();
        assert!(inst.given().iter().all(|t| square.contains(t)));
        let holes: Vec<Triple> = square
            .iter()
            .copied()
            .filter(|t| !inst.given().contains(t))
            .collect();
        assert_eq!(inst.extended(&holes).unwrap().given(), &square[..]);
    }

    #[test]
    fn bad_arguments() {
        assert_eq!(generate_qc(5, 1.5, 0), Err(GenError::BadRatio(1.5)));
        assert!(matches!(generate_qwh(1, 0.5, 0), Err(GenError::Pls(_))));
        assert!("xyz".parse::<Scheme>().is_err());
        assert_eq!("QWH".parse::<Scheme>().unwrap(), Scheme::Qwh);
    }

    #[test]
    fn generators_are_reproducible() {
        for scheme in [Scheme::Qc, Scheme::Qwh] {
            let g = GenScheme { scheme, ratio: 0.6, seed: 42 };
            assert_eq!(g.generate(15).unwrap(), g.generate(15).unwrap());
        }
    }
}
