//! Folner boxes in the integer lattice and the explicit almost-invariant
//! partition of unity built from them, with exact verification of the four
//! defining conditions.
//!
//! Everything here is integer counting and rational arithmetic; there is no
//! floating point. The partition specializes the general construction to
//! the discrete lattice, where the covering functions collapse to point
//! masses and each member becomes `rho_j = (1/|K|) 1_{j + K}`.

pub use num_rational::Ratio;

use crate::error::{Error, Result};

/// The box `[0, n_1) x ... x [0, n_d)` used as a Folner set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolnerSet {
    dims: Vec<i64>,
}

impl FolnerSet {
    pub fn new(dims: Vec<i64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&n| n < 1) {
            return Err(Error::InvalidParameter {
                reason: "Folner box needs at least one axis, all extents >= 1".into(),
            });
        }
        Ok(FolnerSet { dims })
    }

    pub fn dims(&self) -> &[i64] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn volume(&self) -> i64 {
        self.dims.iter().product()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dims.len() && x.iter().zip(&self.dims).all(|(&v, &n)| v >= 0 && v < n)
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &n in &self.dims {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for p in &out {
                for v in 0..n {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
}

/// Exact symmetric-difference ratio `|hK Delta K| / |K|`, by counting.
pub fn folner_ratio(k: &FolnerSet, h: &[i64]) -> Result<Ratio<i64>> {
    if h.len() != k.dim() {
        return Err(Error::ShapeMismatch {
            what: "probe vector dimension",
            expected: k.dim(),
            found: h.len(),
        });
    }
    let mut overlap = 0i64;
    for x in k.points() {
        let shifted: Vec<i64> = x.iter().zip(h).map(|(&a, &s)| a - s).collect();
        if k.contains(&shifted) {
            overlap += 1;
        }
    }
    let sym_diff = 2 * (k.volume() - overlap);
    Ok(Ratio::new(sym_diff, k.volume()))
}

/// Smallest cubic box with `|hK Delta K| / |K| < eps` for every probe `h`,
/// found by exact counting. Probes must share the dimension `dim`.
pub fn folner_for(eps: Ratio<i64>, probe: &[Vec<i64>], dim: usize) -> Result<FolnerSet> {
    if eps <= Ratio::new(0, 1) {
        return Err(Error::InvalidParameter {
            reason: "Folner tolerance must be positive".into(),
        });
    }
    if dim == 0 {
        return Err(Error::InvalidParameter {
            reason: "dimension must be >= 1".into(),
        });
    }
    for h in probe {
        if h.len() != dim {
            return Err(Error::ShapeMismatch {
                what: "probe vector dimension",
                expected: dim,
                found: h.len(),
            });
        }
    }
    // The ratio along a cubic box of side n is at most 2 d max|h| / n, so
    // the search always terminates; the cap is a defense against overflow.
    let cap = 1_000_000i64;
    for n in 1..=cap {
        let candidate = FolnerSet::new(vec![n; dim])?;
        let mut ok = true;
        for h in probe {
            if folner_ratio(&candidate, h)? >= eps {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(candidate);
        }
    }
    Err(Error::InvalidParameter {
        reason: "no Folner box found below the search cap".into(),
    })
}

/// The full box probe `[-radius, radius]^dim`.
pub fn probe_box(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &out {
            for v in -radius..=radius {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// `{0, +/- r e_a}`: the coordinate cross of the given radius.
pub fn probe_cross(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0; dim]];
    for axis in 0..dim {
        for sign in [-1i64, 1] {
            let mut v = vec![0; dim];
            v[axis] = sign * radius;
            out.push(v);
        }
    }
    out
}

/// The partition `rho_j = (1/|K|) 1_{j + K}` over a symmetric window
/// `[-W, W]^d`, indexed by every `j` whose translate meets the window.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    folner: FolnerSet,
    window_radius: i64,
}

impl PartitionOfUnity {
    pub fn folner(&self) -> &FolnerSet {
        &self.folner
    }

    pub fn window_radius(&self) -> i64 {
        self.window_radius
    }

    pub fn dim(&self) -> usize {
        self.folner.dim()
    }

    /// Exact value `rho_j(g)`.
    pub fn rho(&self, j: &[i64], g: &[i64]) -> Ratio<i64> {
        let inside = g
            .iter()
            .zip(j)
            .zip(self.folner.dims())
            .all(|((&a, &b), &n)| {
                let d = a - b;
                d >= 0 && d < n
            });
        if inside {
            Ratio::new(1, self.folner.volume())
        } else {
            Ratio::new(0, 1)
        }
    }

    /// Index range of `j` per axis: every translate `j + K` meeting the
    /// window `[-W, W]^d`.
    pub fn index_range(&self) -> Vec<(i64, i64)> {
        self.folner
            .dims()
            .iter()
            .map(|&n| (-self.window_radius - (n - 1), self.window_radius))
            .collect()
    }

    fn index_points(&self) -> Vec<Vec<i64>> {
        box_points(&self.index_range())
    }

    fn window_points(&self) -> Vec<Vec<i64>> {
        let ranges: Vec<(i64, i64)> = (0..self.dim())
            .map(|_| (-self.window_radius, self.window_radius))
            .collect();
        box_points(&ranges)
    }
}

/// Visits every point of the box without allocating per point.
fn for_each_box_point(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return;
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&cur);
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if cur[axis] < ranges[axis].1 {
                cur[axis] += 1;
                break;
            }
            cur[axis] = ranges[axis].0;
        }
    }
}

fn box_points(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for p in &out {
            for v in lo..=hi {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Builds the partition over the window `[-W, W]^d`. The window must
/// contain a full translate of the box.
pub fn build_partition(folner: &FolnerSet, window_radius: i64) -> Result<PartitionOfUnity> {
    let need = *folner.dims().iter().max().expect("nonempty dims");
    if 2 * window_radius + 1 < need {
        return Err(Error::WindowTooSmall {
            what: "partition window must contain a Folner translate",
            required: need,
        });
    }
    Ok(PartitionOfUnity {
        folner: folner.clone(),
        window_radius,
    })
}

/// Result of one verified condition.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub pass: bool,
    pub detail: String,
}

/// Condition (iii) data: the exact invariance sums per probe.
#[derive(Debug, Clone)]
pub struct AlmostInvarianceReport {
    pub pass: bool,
    /// Largest sum `sum_j |rho_j(g) - rho_j(g - h)|` over interior `g`.
    pub max_sum: Ratio<i64>,
    /// Exact per-probe maxima.
    pub per_probe: Vec<(Vec<i64>, Ratio<i64>)>,
    /// Whether each per-probe maximum equals the Folner ratio of the box.
    pub equals_folner_ratio: bool,
    pub interior_points: usize,
}

#[derive(Debug, Clone)]
pub struct LocalityReport {
    pub pass: bool,
    pub probe_radius: i64,
    /// Number of indices whose member meets the probe box.
    pub count: usize,
    /// `|probe - K|`, the exact expected count.
    pub expected: usize,
}

#[derive(Debug, Clone)]
pub struct PartitionReport {
    /// (i) the members sum to one at every window point.
    pub partition_exact: ConditionReport,
    /// (ii) every support sits inside a translate of the box.
    pub supports_compact: ConditionReport,
    /// (iii) almost invariance under the probes.
    pub almost_invariance: AlmostInvarianceReport,
    /// (iv) only finitely many members meet a compact probe; exact count.
    pub locality: LocalityReport,
    pub pass: bool,
}

/// Verifies conditions (i)-(iv) exactly on the window interior.
///
/// The interior for (iii) is the set of `g` with `g - h` still in the
/// window for every probe; an empty interior is an error asking for a
/// larger window.
pub fn verify_partition(
    p: &PartitionOfUnity,
    probe: &[Vec<i64>],
    eps: Ratio<i64>,
    locality_probe_radius: i64,
) -> Result<PartitionReport> {
    let dim = p.dim();
    for h in probe {
        if h.len() != dim {
            return Err(Error::ShapeMismatch {
                what: "probe vector dimension",
                expected: dim,
                found: h.len(),
            });
        }
    }
    let volume = p.folner().volume();
    let one = Ratio::new(1i64, 1);
    let index_range = p.index_range();
    let in_index = |j: &[i64]| {
        j.iter()
            .zip(&index_range)
            .all(|(&v, &(lo, hi))| v >= lo && v <= hi)
    };

    // (i) For every window point, the members covering it are exactly the
    // translates indexed by g - K, each contributing 1/|K|.
    let mut partition_ok = true;
    let mut partition_detail = String::from("sum_j rho_j(g) = 1 at every window point");
    let folner_points = p.folner().points();
    let mut j_buf = vec![0i64; dim];
    'outer: for g in p.window_points() {
        let mut covering = 0i64;
        for k in &folner_points {
            for (slot, (&a, &b)) in j_buf.iter_mut().zip(g.iter().zip(k)) {
                *slot = a - b;
            }
            if !in_index(&j_buf) {
                partition_ok = false;
                partition_detail =
                    format!("index window misses j = {j_buf:?} covering g = {g:?}");
                break 'outer;
            }
            if p.rho(&j_buf, &g) == Ratio::new(1, volume) {
                covering += 1;
            }
        }
        if Ratio::new(covering, volume) != one {
            partition_ok = false;
            partition_detail = format!("sum at g = {g:?} is {covering}/{volume}");
            break;
        }
    }

    // (ii) supp rho_j = j + K by construction; verify over the window.
    let mut supports_ok = true;
    let mut supports_detail = String::from("every support sits inside its translate j + K");
    let window_ranges: Vec<(i64, i64)> = (0..dim)
        .map(|_| (-p.window_radius(), p.window_radius()))
        .collect();
    let mut diff_buf = vec![0i64; dim];
    'sup: for j in p.index_points() {
        let mut violation = None;
        for_each_box_point(&window_ranges, |g| {
            if violation.is_some() {
                return;
            }
            if p.rho(&j, g) > Ratio::new(0, 1) {
                for (slot, (&a, &b)) in diff_buf.iter_mut().zip(g.iter().zip(&j)) {
                    *slot = a - b;
                }
                if !p.folner().contains(&diff_buf) {
                    violation = Some(g.to_vec());
                }
            }
        });
        if let Some(g) = violation {
            supports_ok = false;
            supports_detail = format!("rho_{j:?} positive outside its translate at {g:?}");
            break 'sup;
        }
    }

    // (iii) Exact invariance sums over the interior.
    let window_ok = |g: &[i64]| g.iter().all(|&v| v.abs() <= p.window_radius());
    let mut interior_points = 0usize;
    let mut max_sum = Ratio::new(0i64, 1);
    let mut per_probe = Vec::with_capacity(probe.len());
    let mut equals_folner = true;
    for h in probe {
        let mut probe_max = Ratio::new(0i64, 1);
        let mut seen_interior = false;
        for g in p.window_points() {
            let shifted: Vec<i64> = g.iter().zip(h).map(|(&a, &b)| a - b).collect();
            if !window_ok(&shifted) {
                continue;
            }
            seen_interior = true;
            interior_points += 1;
            // Sweep a box containing both covering index sets and count the
            // flipped indicators exactly.
            let ranges: Vec<(i64, i64)> = (0..dim)
                .map(|axis| {
                    let lo = g[axis].min(shifted[axis]) - (p.folner().dims()[axis] - 1);
                    let hi = g[axis].max(shifted[axis]);
                    (lo, hi)
                })
                .collect();
            let mut flips = 0i64;
            for_each_box_point(&ranges, |j| {
                let a = p.rho(j, &g);
                let b = p.rho(j, &shifted);
                if a != b {
                    flips += 1;
                }
            });
            let sum = Ratio::new(flips, volume);
            if sum > probe_max {
                probe_max = sum;
            }
        }
        if !seen_interior {
            return Err(Error::WindowTooSmall {
                what: "no interior points for the invariance check",
                required: p.window_radius()
                    + probe
                        .iter()
                        .flat_map(|h| h.iter().map(|v| v.abs()))
                        .max()
                        .unwrap_or(0)
                    + 1,
            });
        }
        // For the box construction the sum is exactly the Folner ratio at
        // every interior point with h inside the box span.
        let expected = folner_ratio(p.folner(), h)?;
        if probe_max != expected {
            equals_folner = false;
        }
        if probe_max > max_sum {
            max_sum = probe_max;
        }
        per_probe.push((h.clone(), probe_max));
    }
    let invariance_pass = max_sum < eps;

    // (iv) Locality: members meeting the probe box are indexed by
    // probe - K; count both ways.
    let probe_ranges: Vec<(i64, i64)> = (0..dim)
        .map(|_| (-locality_probe_radius, locality_probe_radius))
        .collect();
    let probe_points = box_points(&probe_ranges);
    let mut count = 0usize;
    for j in p.index_points() {
        let meets = probe_points
            .iter()
            .any(|g| p.rho(&j, g) > Ratio::new(0, 1));
        if meets {
            count += 1;
        }
    }
    let expected: usize = p
        .folner()
        .dims()
        .iter()
        .map(|&n| (2 * locality_probe_radius + 1 + n - 1) as usize)
        .product();
    let locality_pass = count == expected;

    let pass = partition_ok && supports_ok && invariance_pass && locality_pass;
    Ok(PartitionReport {
        partition_exact: ConditionReport {
            pass: partition_ok,
            detail: partition_detail,
        },
        supports_compact: ConditionReport {
            pass: supports_ok,
            detail: supports_detail,
        },
        almost_invariance: AlmostInvarianceReport {
            pass: invariance_pass,
            max_sum,
            per_probe,
            equals_folner_ratio: equals_folner,
            interior_points,
        },
        locality: LocalityReport {
            pass: locality_pass,
            probe_radius: locality_probe_radius,
            count,
            expected,
        },
        pass,
    })
}

/// Parses a tolerance given as a decimal string ("0.05"), a fraction
/// ("1/20") or an integer, into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    let bad = Error::Parse;
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|e| bad(format!("bad numerator in {s:?}: {e}")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|e| bad(format!("bad denominator in {s:?}: {e}")))?;
        if d == 0 {
            return Err(bad(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let int: i64 = if int_part.is_empty() || int_part == "-" {
            0
        } else {
            int_part
                .parse()
                .map_err(|e| bad(format!("bad integer part in {s:?}: {e}")))?
        };
        if frac_part.is_empty() {
            return Ok(Ratio::new(int, 1));
        }
        if frac_part.len() > 15 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(format!("unsupported decimal {s:?}")));
        }
        let digits: i64 = frac_part
            .parse()
            .map_err(|e| bad(format!("bad fractional part in {s:?}: {e}")))?;
        let scale = 10i64.pow(frac_part.len() as u32);
        let sign = if s.starts_with('-') { -1 } else { 1 };
        return Ok(Ratio::new(int * scale + sign * digits, scale));
    }
    let n: i64 = s
        .parse()
        .map_err(|e| bad(format!("bad rational {s:?}: {e}")))?;
    Ok(Ratio::new(n, 1))
}
