use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::coamoeba::ZonotopeArrangement;
use crate::exactmath::{lll_reduce, IntMatrix, ReducedBasis};
use crate::error::{Error, Result};

/// A cell of the periodic grid: base vertex (grid indices) plus the set of
/// axes along which it extends. Encoded as `flat(base) · 2ⁿ + extent`, so
/// sorting codes sorts cells lexicographically by `(base, extent)`.
type CellCode = u64;

/// Sparse ℤ₂ column: sorted row indices.
pub type Column = Vec<u32>;

fn xor_into(target: &mut Column, other: &[u32], scratch: &mut Column) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

/// Closed cubical complex on the periodic grid `∏ ℤ/mᵢ` of `Tⁿ`.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    n: usize,
    resolution: Vec<usize>,
    /// Kept cells per dimension, ascending codes.
    cells: Vec<Vec<CellCode>>,
    /// `boundaries[k]` is ∂_k (columns = k-cells, rows = (k−1)-cells);
    /// `boundaries[0]` is empty.
    boundaries: Vec<Vec<Column>>,
    /// Code → position within its dimension, `u32::MAX` if not kept.
    position: Vec<u32>,
    restored_cells: usize,
    /// `V` of [`CubicalComplex::grid_basis`], when built from an arrangement
    basis: Option<Vec<Vec<i64>>>,
}

/// Integer-scaled zonotope containment for grid points. Grid point `j`
/// sits at `x = j / m` in grid coordinates, i.e. at `ψ = V x` in
/// arrangement coordinates.
struct GridLocator {
    n: usize,
    d: Vec<i64>,
    /// `V`, row-major
    v: Vec<Vec<i128>>,
    /// per axis: `j ↦ j · scale / mₖ`
    point_scale: Vec<i128>,
    /// per axis: the lift `s` has center `(δ̃ + 2s) · scale / (2dᵢ)`,
    /// which is `center_base + s · center_step`
    center_base: Vec<i128>,
    center_step: Vec<i128>,
    /// per axis: half the extent, times `scale`
    half_extent: Vec<i128>,
    normals: Vec<Vec<i128>>,
    offsets: Vec<i128>,
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::TooLarge(format!("grid arithmetic value {x}")))
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

impl GridLocator {
    fn new(arr: &ZonotopeArrangement, v: &IntMatrix, m: &[usize]) -> Result<Self> {
        let n = arr.n;
        let two = BigInt::from(2);
        let mut scale = BigInt::one();
        for i in 0..n {
            scale = scale.lcm(&BigInt::from(m[i]));
            scale = scale.lcm(&BigInt::from(2 * arr.d[i]));
            scale = scale.lcm(&(arr.extents[i].denom() * &two));
        }
        for f in &arr.shape.facets {
            scale = scale.lcm(f.offset.denom());
        }
        let scaled = |x: &BigRational| to_i128(&(x * BigRational::from_integer(scale.clone())).to_integer());
        let point_scale = (0..n)
            .map(|k| to_i128(&(&scale / BigInt::from(m[k]))))
            .collect::<Result<_>>()?;
        let center_step = (0..n)
            .map(|i| to_i128(&(&scale / BigInt::from(arr.d[i]))))
            .collect::<Result<Vec<_>>>()?;
        let center_base = (0..n)
            .map(|i| {
                let half = to_i128(&(&scale / BigInt::from(2 * arr.d[i])))?;
                Ok(if arr.delta_g.get(i) { half } else { 0 })
            })
            .collect::<Result<_>>()?;
        let half_extent = arr
            .extents
            .iter()
            .map(|l| scaled(&(l / BigRational::from_integer(two.clone()))))
            .collect::<Result<_>>()?;
        let normals = arr
            .shape
            .facets
            .iter()
            .map(|f| f.normal.iter().map(to_i128).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let offsets = arr.shape.facets.iter().map(|f| scaled(&f.offset)).collect::<Result<_>>()?;
        let v = (0..n)
            .map(|i| (0..n).map(|k| to_i128(v.get(i, k))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(GridLocator {
            n,
            d: arr.d.iter().map(|&x| x as i64).collect(),
            v,
            point_scale,
            center_base,
            center_step,
            half_extent,
            normals,
            offsets,
        })
    }

    /// Index `α` and lift `k` of the open zonotope strictly containing the
    /// unwrapped grid point `j`, if any.
    fn label(&self, j: &[usize]) -> Option<(Vec<i64>, Vec<i64>)> {
        let n = self.n;
        let x: Vec<i128> = (0..n).map(|k| j[k] as i128 * self.point_scale[k]).collect();
        let psi: Vec<i128> = self.v.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        // lifts whose bounding box strictly contains the point, per axis
        let mut lo = vec![0i128; n];
        let mut hi = vec![0i128; n];
        for i in 0..n {
            let rel = psi[i] - self.center_base[i];
            lo[i] = (rel - self.half_extent[i]).div_euclid(self.center_step[i]) + 1;
            hi[i] = ceil_div(rel + self.half_extent[i], self.center_step[i]) - 1;
            if lo[i] > hi[i] {
                return None;
            }
        }
        let mut s = lo.clone();
        let mut rel = vec![0i128; n];
        loop {
            for i in 0..n {
                rel[i] = psi[i] - (self.center_base[i] + s[i] * self.center_step[i]);
            }
            let inside = self.normals.iter().zip(&self.offsets).all(|(nu, off)| {
                let dot: i128 = nu.iter().zip(&rel).map(|(a, b)| a * b).sum();
                dot.abs() < *off
            });
            if inside {
                let (alpha, lift) = (0..n)
                    .map(|i| {
                        let si = s[i] as i64;
                        (si.rem_euclid(self.d[i]), si.div_euclid(self.d[i]))
                    })
                    .unzip();
                return Some((alpha, lift));
            }
            let mut axis = n;
            loop {
                if axis == 0 {
                    return None;
                }
                axis -= 1;
                s[axis] += 1;
                if s[axis] <= hi[axis] {
                    break;
                }
                s[axis] = lo[axis];
            }
        }
    }
}

impl CubicalComplex {
    /// Change of coordinates `ψ = V x` from grid coordinates `x` to
    /// arrangement coordinates. The columns of `G⁻¹D` are the torus lattice
    /// seen in coordinates where every zonotope is a translate of the
    /// standard one; `V` LLL-reduces them, so that grid cells are not much
    /// more skewed than the zonotopes are round.
    pub fn grid_basis(arr: &ZonotopeArrangement) -> Result<ReducedBasis> {
        let d: Vec<BigInt> = arr.d.iter().map(|&x| BigInt::from(x)).collect();
        let lattice = arr.g.inverse_unimodular()?.mul(&IntMatrix::diagonal(&d))?;
        lll_reduce(&lattice)
    }

    /// Keeps every cell except those whose vertices all lie strictly inside
    /// one zonotope lift (such a closed cell lies inside the open zonotope
    /// by convexity), then closes the kept set under faces. The grid is
    /// `∏ ℤ/mᵢ` in the coordinates of [`CubicalComplex::grid_basis`].
    pub fn build(arr: &ZonotopeArrangement, m: &[usize]) -> Result<Self> {
        let n = arr.n;
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension { n, supported: "1..=3" });
        }
        if m.len() != n || m.iter().any(|&mi| mi < 2) {
            return Err(Error::BadResolution {
                resolution: m.to_vec(),
                n,
            });
        }
        let basis = Self::grid_basis(arr)?;
        let locator = GridLocator::new(arr, &basis.transform, m)?;
        let mut c = Self::from_labels(n, m, |j| locator.label(j))?;
        c.basis = basis.transform.to_i64_rows();
        Ok(c)
    }

    /// The whole torus at resolution `m` (nothing removed).
    pub fn full_torus(m: &[usize]) -> Result<Self> {
        if m.is_empty() || m.len() > 3 || m.iter().any(|&x| x < 2) {
            return Err(Error::InvalidInput(format!("bad torus resolution {m:?}")));
        }
        Self::from_labels(m.len(), m, |_| None)
    }

    /// Generic construction from a labelling of the unwrapped grid points
    /// `∏ {0, …, mᵢ}` by `(region, lift)`: a cell is removed iff all its
    /// vertices carry the same `Some` label.
    ///
    /// A region is a convex open set, so its removed top cells should form a
    /// single facet-connected component on the torus. Near acute corners the
    /// vertex test leaves detached islands, each of which would add a
    /// spurious hole at every resolution; all but the largest component of
    /// each region are put back.
    pub fn from_labels<F>(n: usize, m: &[usize], label: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Option<(Vec<i64>, Vec<i64>)>,
    {
        let base_count: usize = m.iter().product();
        let ext_count = 1usize << n;
        let total = base_count
            .checked_mul(ext_count)
            .filter(|&t| t < u32::MAX as usize)
            .ok_or_else(|| Error::TooLarge(format!("grid {m:?}")))?;

        // labels on the (m+1)^n unwrapped grid
        let ustrides = strides(&m.iter().map(|x| x + 1).collect::<Vec<_>>());
        let ucount: usize = m.iter().map(|x| x + 1).product();
        let mut label_ids: Vec<u32> = Vec::with_capacity(ucount);
        let mut distinct: HashMap<(Vec<i64>, Vec<i64>), u32> = HashMap::new();
        let mut regions: HashMap<Vec<i64>, u32> = HashMap::new();
        // region of each label id (index 0 unused)
        let mut region_of: Vec<u32> = vec![u32::MAX];
        let mut point = vec![0usize; n];
        for flat in 0..ucount {
            unflatten_into(flat, &ustrides, &mut point);
            let id = match label(&point) {
                None => 0,
                Some(l) => {
                    let next = distinct.len() as u32 + 1;
                    *distinct.entry(l.clone()).or_insert_with(|| {
                        let r = regions.len() as u32;
                        region_of.push(*regions.entry(l.0).or_insert(r));
                        next
                    })
                }
            };
            label_ids.push(id);
        }

        let bstrides = strides(m);
        let mut kept = vec![false; total];
        let mut base = vec![0usize; n];
        for b in 0..base_count {
            unflatten_into(b, &bstrides, &mut base);
            for e in 0..ext_count {
                // vertices base + ε, ε ⊆ e, unwrapped
                let mut first = None;
                let mut removed = true;
                for eps in 0..ext_count {
                    if eps & !e != 0 {
                        continue;
                    }
                    let uflat: usize = (0..n)
                        .map(|i| (base[i] + (eps >> i & 1)) * ustrides[i])
                        .sum();
                    let id = label_ids[uflat];
                    if id == 0 || first.is_some_and(|f| f != id) {
                        removed = false;
                        break;
                    }
                    first = Some(id);
                }
                kept[b * ext_count + e] = !removed;
            }
        }
        let restored_cells = restore_islands(n, m, &mut kept, |b| {
            unflatten_into(b, &bstrides, &mut base);
            let uflat: usize = (0..n).map(|i| base[i] * ustrides[i]).sum();
            region_of[label_ids[uflat] as usize]
        });
        // close under faces, top dimension first
        for dim in (1..=n).rev() {
            for code in 0..total {
                let e = code % ext_count;
                if e.count_ones() as usize != dim || !kept[code] {
                    continue;
                }
                for face in faces(code as CellCode, n, m, &bstrides) {
                    kept[face as usize] = true;
                }
            }
        }

        Ok(Self::assemble(n, m, &kept, restored_cells))
    }

    /// The complex whose cells are the codes flagged in `kept` (which must
    /// be closed under faces).
    fn assemble(n: usize, m: &[usize], kept: &[bool], restored_cells: usize) -> Self {
        let ext_count = 1usize << n;
        let bstrides = strides(m);
        let mut cells: Vec<Vec<CellCode>> = vec![Vec::new(); n + 1];
        let mut position = vec![u32::MAX; kept.len()];
        for (code, &k) in kept.iter().enumerate() {
            if k {
                let dim = (code % ext_count).count_ones() as usize;
                position[code] = cells[dim].len() as u32;
                cells[dim].push(code as CellCode);
            }
        }
        let mut boundaries: Vec<Vec<Column>> = vec![Vec::new()];
        for dim in 1..=n {
            let cols = cells[dim]
                .iter()
                .map(|&code| {
                    let mut col: Column = faces(code, n, m, &bstrides)
                        .map(|f| position[f as usize])
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            boundaries.push(cols);
        }
        CubicalComplex {
            n,
            resolution: m.to_vec(),
            cells,
            boundaries,
            position,
            restored_cells,
            basis: None,
        }
    }

    /// A negation-invariant subcomplex onto which this one deformation
    /// retracts, obtained by elementary collapses done in pairs `{(σ, τ),
    /// (−σ, −τ)}`. Pairs whose coface `τ` is fixed by negation are skipped.
    /// Requires the complex to be negation-invariant.
    pub fn collapse(&self) -> Self {
        let n = self.n;
        let m = &self.resolution;
        let bstrides = strides(m);
        let total = self.position.len();
        let mut alive = vec![false; total];
        for dim in &self.cells {
            for &c in dim {
                alive[c as usize] = true;
            }
        }
        let cofaces = |code: usize| cofaces(code as CellCode, n, m, &bstrides);
        let mut count = vec![0u8; total];
        let mut queue = std::collections::VecDeque::new();
        for code in 0..total {
            if alive[code] {
                count[code] = cofaces(code).filter(|&t| alive[t as usize]).count() as u8;
                if count[code] == 1 {
                    queue.push_back(code);
                }
            }
        }
        while let Some(sigma) = queue.pop_front() {
            if !alive[sigma] || count[sigma] != 1 {
                continue;
            }
            let tau = cofaces(sigma).find(|&t| alive[t as usize]).expect("one coface") as usize;
            let neg_tau = negate_code(tau as CellCode, n, m) as usize;
            if neg_tau == tau {
                continue;
            }
            let neg_sigma = negate_code(sigma as CellCode, n, m) as usize;
            for (s, t) in [(sigma, tau), (neg_sigma, neg_tau)] {
                debug_assert!(alive[s] && alive[t] && count[s] == 1 && count[t] == 0);
                alive[s] = false;
                alive[t] = false;
                for f in faces(t as CellCode, n, m, &bstrides).chain(faces(s as CellCode, n, m, &bstrides)) {
                    let f = f as usize;
                    if alive[f] {
                        count[f] -= 1;
                        if count[f] == 1 {
                            queue.push_back(f);
                        }
                    }
                }
            }
        }
        let mut c = Self::assemble(n, m, &alive, self.restored_cells);
        c.basis = self.basis.clone();
        c
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Top cells put back by the island repair in [`CubicalComplex::from_labels`].
    pub fn restored_cells(&self) -> usize {
        self.restored_cells
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn boundary(&self, k: usize) -> &[Column] {
        &self.boundaries[k]
    }

    /// `∂_{k−1} ∘ ∂_k = 0` for every `k`.
    pub fn boundary_squared_is_zero(&self) -> bool {
        let mut scratch = Vec::new();
        (2..=self.n).all(|k| {
            self.boundaries[k].iter().all(|col| {
                let mut acc: Column = Vec::new();
                for &face in col {
                    xor_into(&mut acc, &self.boundaries[k - 1][face as usize], &mut scratch);
                }
                acc.is_empty()
            })
        })
    }

    /// Whether the closed top cell containing `x` (grid coordinates, in
    /// turns; base cell `⌊x·m⌋` on each axis) is kept. A removed top cell
    /// lies inside an open zonotope, so every coamoeba point is covered.
    pub fn covers_point(&self, x: &[BigRational]) -> bool {
        let n = self.n;
        let ext_count = 1usize << n;
        let bstrides = strides(&self.resolution);
        let base: usize = (0..n)
            .map(|i| {
                let m = BigInt::from(self.resolution[i]);
                let b = (&x[i] * BigRational::from_integer(m.clone())).floor().to_integer().mod_floor(&m);
                b.to_usize().expect("reduced modulo m") * bstrides[i]
            })
            .sum();
        self.position[base * ext_count + ext_count - 1] != u32::MAX
    }

    /// Every face of a kept cell is kept.
    pub fn is_closed_under_faces(&self) -> bool {
        let bstrides = strides(&self.resolution);
        self.cells.iter().flatten().all(|&code| {
            faces(code, self.n, &self.resolution, &bstrides).all(|f| self.position[f as usize] != u32::MAX)
        })
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) })
            .sum()
    }

    /// Image of a kept cell under `x ↦ −x`, as a position in its dimension.
    fn negate_position(&self, dim: usize, pos: u32) -> Result<u32> {
        let code = self.cells[dim][pos as usize];
        let image = negate_code(code, self.n, &self.resolution);
        match self.position[image as usize] {
            u32::MAX => Err(Error::SymmetryViolation(format!(
                "cell {} of dimension {dim} maps outside the complex",
                self.describe(code)
            ))),
            p => Ok(p),
        }
    }

    /// Checks that negation maps kept cells to kept cells in every dimension.
    pub fn check_negation_symmetry(&self) -> Result<()> {
        for dim in 0..=self.n {
            for pos in 0..self.cells[dim].len() as u32 {
                self.negate_position(dim, pos)?;
            }
        }
        Ok(())
    }

    fn describe(&self, code: CellCode) -> String {
        let n = self.n;
        let ext_count = 1u64 << n;
        let e = code % ext_count;
        let bstrides = strides(&self.resolution);
        let mut b = (code / ext_count) as usize;
        let mut parts = Vec::with_capacity(n);
        for i in 0..n {
            let bi = b / bstrides[i];
            b %= bstrides[i];
            if e >> i & 1 == 1 {
                parts.push(format!("[{},{}]", bi, bi + 1));
            } else {
                parts.push(format!("[{bi}]"));
            }
        }
        parts.join(" x ")
    }

    /// Text dump: a header line, then one cell per line as a product of grid
    /// intervals (indices are on the periodic grid, `mᵢ ≡ 0`).
    pub fn to_cell_list(&self) -> String {
        let mut out = String::new();
        let dims: Vec<String> = self.resolution.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "# periodic cubical grid {} ; cells {:?}", dims.join("x"), self.cell_counts());
        if let Some(v) = &self.basis {
            let _ = writeln!(out, "# grid point j sits at psi = V j / m with V = {v:?}");
        }
        for dim in 0..=self.n {
            for &code in &self.cells[dim] {
                let _ = writeln!(out, "{dim} {}", self.describe(code));
            }
        }
        out
    }

    /// ℤ₂ homology plus the rank of `1 + c` on `H_{n−1}`, computed on
    /// [`CubicalComplex::collapse`]. The boundary ranks are those of the
    /// collapsed complex.
    pub fn homology(&self) -> Result<CubicalHomology> {
        self.check_negation_symmetry()?;
        self.collapse().reduce_homology()
    }

    /// Column reduction with clearing on this complex as it stands.
    fn reduce_homology(&self) -> Result<CubicalHomology> {
        let n = self.n;
        let mut ranks = vec![0usize; n + 2];
        let mut cleared: Vec<bool> = vec![false; self.cells[n].len()];
        let mut reductions: Vec<Option<Reduction>> = (0..=n + 1).map(|_| None).collect();
        let mut representatives: Vec<Column> = Vec::new();

        for k in (1..=n).rev() {
            let red = reduce(&self.boundaries[k], self.cells[k - 1].len(), &cleared, k == n - 1);
            ranks[k] = red.rank;
            let mut next_cleared = vec![false; self.cells[k - 1].len()];
            for (row, col) in red.pivot_of_row.iter().enumerate() {
                if col.is_some() {
                    next_cleared[row] = true;
                }
            }
            if k == n - 1 {
                for (j, col) in red.columns.iter().enumerate() {
                    if col.is_empty() && !cleared[j] {
                        representatives.push(red.v.as_ref().expect("tracked")[j].clone());
                    }
                }
            }
            reductions[k] = Some(red);
            cleared = next_cleared;
        }
        if n == 1 {
            // H_0 representatives: vertices not hit as pivots of ∂_1
            for (j, &c) in cleared.iter().enumerate() {
                if !c {
                    representatives.push(vec![j as u32]);
                }
            }
        }
        let betti: Vec<u64> = (0..=n)
            .map(|k| (self.cells[k].len() - ranks[k] - ranks[k + 1]) as u64)
            .collect();
        if representatives.len() as u64 != betti[n - 1] {
            return Err(Error::ConsistencyFailure(format!(
                "{} essential classes in degree {} but b = {}",
                representatives.len(),
                n - 1,
                betti[n - 1]
            )));
        }

        // rank of {(1 + c)(h)} modulo the boundaries B_{n−1}
        let top = reductions[n].as_ref().expect("top reduction");
        let mut extra: HashMap<u32, Column> = HashMap::new();
        let mut scratch = Vec::new();
        let mut conjugation_rank = 0u64;
        for h in &representatives {
            let mut image: Column = h
                .iter()
                .map(|&p| self.negate_position(n - 1, p))
                .collect::<Result<_>>()?;
            image.sort_unstable();
            xor_into(&mut image, h, &mut scratch);
            while let Some(&low) = image.last() {
                if let Some(col) = top.pivot_of_row[low as usize] {
                    xor_into(&mut image, &top.columns[col as usize], &mut scratch);
                } else if let Some(v) = extra.get(&low) {
                    xor_into(&mut image, v, &mut scratch);
                } else {
                    break;
                }
            }
            if let Some(&low) = image.last() {
                extra.insert(low, image);
                conjugation_rank += 1;
            }
        }
        Ok(CubicalHomology {
            betti,
            boundary_ranks: ranks[1..=n].to_vec(),
            conjugation_rank,
        })
    }
}

/// Result of [`CubicalComplex::homology`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalHomology {
    pub betti: Vec<u64>,
    /// `rank ∂_k` for `k = 1..=n`.
    pub boundary_ranks: Vec<usize>,
    pub conjugation_rank: u64,
}

struct Reduction {
    columns: Vec<Column>,
    pivot_of_row: Vec<Option<u32>>,
    rank: usize,
    v: Option<Vec<Column>>,
}

/// Standard left-to-right column reduction over ℤ₂. Columns flagged in
/// `skip` are known to reduce to zero and are left empty. With `track`, the
/// change of basis `V` is kept (`R = ∂ · V`).
fn reduce(boundary: &[Column], rows: usize, skip: &[bool], track: bool) -> Reduction {
    let mut columns: Vec<Column> = Vec::with_capacity(boundary.len());
    let mut pivot_of_row: Vec<Option<u32>> = vec![None; rows];
    let mut v: Vec<Column> = Vec::new();
    let mut scratch = Vec::new();
    let mut rank = 0;
    for (j, col) in boundary.iter().enumerate() {
        if skip.get(j).copied().unwrap_or(false) {
            columns.push(Vec::new());
            if track {
                v.push(vec![j as u32]);
            }
            continue;
        }
        let mut cur = col.clone();
        let mut vj: Column = vec![j as u32];
        while let Some(&low) = cur.last() {
            match pivot_of_row[low as usize] {
                Some(k) => {
                    xor_into(&mut cur, &columns[k as usize], &mut scratch);
                    if track {
                        xor_into(&mut vj, &v[k as usize], &mut scratch);
                    }
                }
                None => break,
            }
        }
        if let Some(&low) = cur.last() {
            pivot_of_row[low as usize] = Some(j as u32);
            rank += 1;
        }
        columns.push(cur);
        if track {
            v.push(vj);
        }
    }
    Reduction {
        columns,
        pivot_of_row,
        rank,
        v: track.then_some(v),
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Groups removed top cells into facet-connected components (with wrap),
/// keeps the largest component of every region (ties: smallest base) and
/// marks the others kept. Returns the number of top cells restored.
fn restore_islands<R>(n: usize, m: &[usize], kept: &mut [bool], mut region: R) -> usize
where
    R: FnMut(usize) -> u32,
{
    let ext_count = 1usize << n;
    let full = ext_count - 1;
    let base_count: usize = m.iter().product();
    let bstrides = strides(m);
    let removed = |kept: &[bool], b: usize, e: usize| !kept[b * ext_count + e];
    let mut parent: Vec<usize> = (0..base_count).collect();
    for b in 0..base_count {
        if !removed(kept, b, full) {
            continue;
        }
        for i in 0..n {
            let bi = (b / bstrides[i]) % m[i];
            let nb = b - bi * bstrides[i] + ((bi + 1) % m[i]) * bstrides[i];
            if removed(kept, nb, full) && removed(kept, nb, full & !(1 << i)) {
                let (ra, rb) = (find(&mut parent, b), find(&mut parent, nb));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    // component root → size; roots are the smallest base in the component
    let mut size: HashMap<usize, usize> = HashMap::new();
    for b in 0..base_count {
        if removed(kept, b, full) {
            *size.entry(find(&mut parent, b)).or_insert(0) += 1;
        }
    }
    let mut best: HashMap<u32, (usize, usize)> = HashMap::new();
    let mut roots: Vec<usize> = size.keys().copied().collect();
    roots.sort_unstable();
    for root in roots {
        let r = region(root);
        let cand = (size[&root], root);
        best.entry(r)
            .and_modify(|cur| {
                if cand.0 > cur.0 {
                    *cur = cand;
                }
            })
            .or_insert(cand);
    }
    let winners: std::collections::HashSet<usize> = best.values().map(|&(_, root)| root).collect();
    let mut restored = 0;
    for b in 0..base_count {
        if removed(kept, b, full) && !winners.contains(&find(&mut parent, b)) {
            kept[b * ext_count + full] = true;
            restored += 1;
        }
    }
    restored
}

fn strides(m: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; m.len()];
    for i in (0..m.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * m[i + 1];
    }
    s
}

fn unflatten_into(mut flat: usize, strides: &[usize], out: &mut [usize]) {
    for (o, s) in out.iter_mut().zip(strides) {
        *o = flat / s;
        flat %= s;
    }
}

/// Image of a cell under `x ↦ −x`: on an axis where the cell extends,
/// `[b, b+1] ↦ [−b−1, −b]`.
fn negate_code(code: CellCode, n: usize, m: &[usize]) -> CellCode {
    let ext_count = 1u64 << n;
    let e = code % ext_count;
    let bstrides = strides(m);
    let mut b = (code / ext_count) as usize;
    let mut image = 0usize;
    for i in 0..n {
        let bi = b / bstrides[i];
        b %= bstrides[i];
        let shift = (e >> i & 1) as usize;
        image += ((2 * m[i] - bi - shift) % m[i]) * bstrides[i];
    }
    image as u64 * ext_count + e
}

/// Codes of the `2(n−k)` cells having a `k`-cell as a facet.
fn cofaces<'a>(code: CellCode, n: usize, m: &'a [usize], bstrides: &'a [usize]) -> impl Iterator<Item = CellCode> + 'a {
    let ext_count = 1u64 << n;
    let e = code % ext_count;
    let b = (code / ext_count) as usize;
    (0..n).filter(move |&i| e >> i & 1 == 0).flat_map(move |i| {
        let ce = e | 1 << i;
        let bi = (b / bstrides[i]) % m[i];
        let lower = b - bi * bstrides[i] + ((bi + m[i] - 1) % m[i]) * bstrides[i];
        [b as u64 * ext_count + ce, lower as u64 * ext_count + ce]
    })
}

/// Codes of the `2k` facets of a `k`-cell on the periodic grid.
fn faces<'a>(code: CellCode, n: usize, m: &'a [usize], bstrides: &'a [usize]) -> impl Iterator<Item = CellCode> + 'a {
    let ext_count = 1u64 << n;
    let e = code % ext_count;
    let b = (code / ext_count) as usize;
    (0..n).filter(move |&i| e >> i & 1 == 1).flat_map(move |i| {
        let fe = e & !(1 << i);
        let bi = (b / bstrides[i]) % m[i];
        let upper = b - bi * bstrides[i] + ((bi + 1) % m[i]) * bstrides[i];
        [
            b as u64 * ext_count + fe,
            upper as u64 * ext_count + fe,
        ]
    })
}
