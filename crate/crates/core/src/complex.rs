//! Cells, presented chain complexes and coordinate spaces for wedge squares.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{input, Result};
use crate::qlinalg::{map_matrix, q, ChainComplex, FormalSum, Presentation, Rational, SignedOrbitPresentation, SparseMatQ};
use crate::units::Wedge2;

/// Generator labels. Residues are stored as u64 (mod N, or encoded in F_q).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Cell {
    Tri([u64; 3]),
    Edge([u64; 2]),
    /// [β, 0]
    CuspInf(u64),
    /// [0, β]
    CuspZero(u64),
    /// Coset g·T of the triangle, g = (a, b, c, d) mod N.
    TriMat([u64; 4]),
    /// Coset g·G of the edge (0, ∞).
    EdgeMat([u64; 4]),
    /// Translate of the basic polyhedron, indexed by a row (α, β).
    Poly([u64; 2]),
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Tri(t) => write!(f, "T{:?}", t),
            Cell::Edge(e) => write!(f, "E{:?}", e),
            Cell::CuspInf(b) => write!(f, "[{},0]", b),
            Cell::CuspZero(b) => write!(f, "[0,{}]", b),
            Cell::TriMat(m) => write!(f, "gT{:?}", m),
            Cell::EdgeMat(m) => write!(f, "gG{:?}", m),
            Cell::Poly(r) => write!(f, "B{:?}", r),
        }
    }
}

/// Builds the signed-orbit quotient of `gens` under `rel(g) = [(h, s)]` meaning g = s·h.
pub fn present(gens: Vec<Cell>, rel: impl Fn(&Cell) -> Vec<(Cell, i8)>) -> Result<Presentation<Cell>> {
    let mut p = SignedOrbitPresentation::new(gens.iter().cloned());
    for g in &gens {
        for (h, s) in rel(g) {
            p.relate(g, &h, s)?;
        }
    }
    Ok(p.finish())
}

/// Checks that `f` respects the relations of `src`: every generator maps to
/// its sign times the image of its basis representative.
pub fn well_defined<K: Ord + Clone + fmt::Debug>(
    src: &Presentation<Cell>,
    dst: &Presentation<K>,
    f: impl Fn(&Cell) -> Result<FormalSum<K>>,
) -> Result<bool> {
    let labels: Vec<Cell> = src.labels().cloned().collect();
    let basis_img: Vec<BTreeMap<usize, Rational>> = src.basis.iter().map(|b| dst.project_sum(&f(b)?)).collect::<Result<_>>()?;
    for g in labels {
        let img = dst.project_sum(&f(&g)?)?;
        let expect: BTreeMap<usize, Rational> = match src.coordinate(&g)? {
            None => BTreeMap::new(),
            Some((i, s)) => basis_img[i].iter().map(|(k, v)| (*k, v * q(s as i64))).collect(),
        };
        if img != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct PresentedChainComplex {
    pub names: Vec<String>,
    pub degrees: Vec<Presentation<Cell>>,
    /// diffs[k]: degrees[k] → degrees[k+1].
    pub diffs: Vec<SparseMatQ>,
    /// Cohomological degree of degrees[0].
    pub first_degree: usize,
}

impl PresentedChainComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|p| p.dim()).collect()
    }

    pub fn as_chain_complex(&self) -> Result<ChainComplex> {
        ChainComplex::new(self.dims(), self.diffs.clone())
    }

    pub fn is_complex(&self) -> Result<bool> {
        self.as_chain_complex()?.is_complex()
    }

    pub fn cohomology_dims(&self) -> Result<Vec<usize>> {
        Ok(self.as_chain_complex()?.cohomology_dims())
    }

    pub fn degree(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub fn differential(
    src: &Presentation<Cell>,
    dst: &Presentation<Cell>,
    f: impl Fn(&Cell) -> Result<FormalSum<Cell>>,
) -> Result<SparseMatQ> {
    map_matrix(src, dst, f)
}

/// Coordinates on Λ² of a space with an ordered symbol basis.
#[derive(Clone, Debug)]
pub struct WedgeSpace<S: Ord + Clone> {
    pub symbols: Vec<S>,
    pub pairs: Vec<(S, S)>,
    index: BTreeMap<(S, S), usize>,
}

impl<S: Ord + Clone + fmt::Debug> WedgeSpace<S> {
    pub fn new(mut symbols: Vec<S>) -> Self {
        symbols.sort();
        symbols.dedup();
        let mut pairs = Vec::new();
        for i in 0..symbols.len() {
            for j in i + 1..symbols.len() {
                pairs.push((symbols[i].clone(), symbols[j].clone()));
            }
        }
        let index = pairs.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        WedgeSpace { symbols, pairs, index }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn coords(&self, w: &Wedge2<S>) -> Result<BTreeMap<usize, Rational>> {
        let mut out = BTreeMap::new();
        for (p, c) in w.iter() {
            match self.index.get(p) {
                Some(&i) => {
                    out.insert(i, c.clone());
                }
                None => return input(format!("wedge term {:?} outside the symbol basis", p)),
            }
        }
        Ok(out)
    }

    pub fn matrix<T>(&self, cols: &[T], f: impl Fn(&T) -> Result<Wedge2<S>>) -> Result<SparseMatQ> {
        let mut m = SparseMatQ::zeros(self.dim(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            m.set_column(j, self.coords(&f(c)?)?);
        }
        Ok(m)
    }
}

/// Coordinates of a formal sum over an ordered symbol list.
pub fn sum_coords<S: Ord + Clone + fmt::Debug>(symbols: &[S], s: &FormalSum<S>, offset: usize) -> Result<BTreeMap<usize, Rational>> {
    let mut out = BTreeMap::new();
    for (k, c) in s.iter() {
        match symbols.iter().position(|x| x == k) {
            Some(i) => {
                out.insert(i + offset, c.clone());
            }
            None => return input(format!("symbol {:?} outside the basis", k)),
        }
    }
    Ok(out)
}

/// Sign of the permutation taking (0,1,2) to `p`.
pub fn perm3_sign(p: [usize; 3]) -> i8 {
    let mut inv = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

pub const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::wedge;

    #[test]
    fn perm_signs() {
        let s: Vec<i8> = PERMS3.iter().map(|p| perm3_sign(*p)).collect();
        assert_eq!(s, vec![1, -1, -1, 1, 1, -1]);
    }

    #[test]
    fn wedge_space_coordinates() {
        let w = WedgeSpace::new(vec![3u32, 1, 2]);
        assert_eq!(w.dim(), 3);
        let c = w.coords(&wedge(&2, &1)).unwrap();
        assert_eq!(c, BTreeMap::from([(0, q(-1))]));
        assert!(w.coords(&wedge(&2, &7)).is_err());
    }

    #[test]
    fn presentation_and_well_definedness() {
        let gens = vec![Cell::Edge([0, 1]), Cell::Edge([1, 0]), Cell::Edge([1, 1])];
        let p = present(gens, |g| match g {
            Cell::Edge([a, b]) => vec![(Cell::Edge([*b, *a]), -1)],
            _ => vec![],
        })
        .unwrap();
        assert_eq!(p.dim(), 1);
        let id = |g: &Cell| Ok(FormalSum::single(g.clone()));
        assert!(well_defined(&p, &p, id).unwrap());
        let bad = |g: &Cell| Ok(if *g == Cell::Edge([0, 1]) { FormalSum::single(g.clone()) } else { FormalSum::zero() });
        assert!(!well_defined(&p, &p, bad).unwrap());
    }
}
