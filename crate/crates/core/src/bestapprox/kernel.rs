//! Fixed-point enumeration kernel. Matrix entries are snapshotted as
//! scaled-integer intervals (numerators of lo/hi at scale 2^k), so every
//! per-candidate quantity computed here is a certified integer interval.
//! The kernel's job is to reduce the full enumeration box to a small
//! Pareto superset of record candidates; exact certification of the
//! survivors happens in the caller.

use rayon::prelude::*;

/// Height key in units fixed per run: the sup-norm shell for the max norm,
/// max w_i |b_i| at the weight common denominator for weighted max, and
/// the p-th power sum for integer p. Ordering by key is ordering by height
/// in all three cases.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Norm1Fast {
    Max,
    WMax,
    PowInt { u: u32 },
}

#[derive(Debug, Clone)]
pub(crate) enum Norm2Fast {
    Max,
    /// weights scaled to integers; distances are right-shifted first so the
    /// products stay inside i128
    WMax { wnum: Vec<i128>, shift: u32 },
    PowInt { u: u32, shift: u32 },
    /// surrogate for a norm evaluated only at certification time: the
    /// sup-norm distance scaled by the declared equivalence constants
    /// (numerator pairs at a common scale)
    Equiv { lo_num: i128, hi_num: i128 },
}

pub(crate) struct FastProblem {
    pub n: usize,
    pub m: usize,
    /// fixed-point scale: entries are in units of 2^-k
    pub k: u32,
    /// integer weights for the weighted-max height key (scale W), empty otherwise
    pub n1_wnum: Vec<i128>,
    pub n1: Norm1Fast,
    pub n2: Norm2Fast,
    /// column-major scaled entry bounds: cols_lo[j][i] <= entry(i,j)*2^k <= cols_hi[j][i]
    pub cols_lo: Vec<Vec<i128>>,
    pub cols_hi: Vec<Vec<i128>>,
    /// sup-norm box radius
    pub s_box: i64,
    /// admission bound on the height key
    pub h_adm: i128,
}

#[derive(Debug, Clone)]
pub(crate) struct RawCand {
    pub hkey: i128,
    pub qlo: i128,
    pub qhi: i128,
    pub bhat: Vec<i64>,
}

/// Frontier + kept-candidate scratch implementing conservative Pareto
/// pruning: a candidate is discarded only when some already-seen candidate
/// at height <= its height has a certified strictly better quality.
struct Scratch {
    /// (hkey, qhi) with hkey increasing er qhi strictly decreasing
    frontier: Vec<(i128, i128)>,
    kept: Vec<RawCand>,
}

impl Scratch {
    fn new() -> Self {
        Scratch {
            frontier: Vec::new(),
            kept: Vec::new(),
        }
    }

    fn bound_at(&self, hkey: i128) -> Option<i128> {
        // min qhi among frontier entries with height <= hkey: the last one
        let idx = self.frontier.partition_point(|e| e.0 <= hkey);
        if idx == 0 {
            None
        } else {
            Some(self.frontier[idx - 1].1)
        }
    }

    fn insert(&mut self, c: RawCand) {
        if let Some(b) = self.bound_at(c.hkey) {
            if c.qlo > b {
                return;
            }
        }
        // update frontier if this strictly improves at its height
        let improves = match self.bound_at(c.hkey) {
            None => true,
            Some(b) => c.qhi < b,
        };
        if improves {
            let idx = self.frontier.partition_point(|e| e.0 < c.hkey);
            // drop entries at height >= hkey with qhi >= c.qhi
            let mut tail = idx;
            while tail < self.frontier.len() && self.frontier[tail].1 >= c.qhi {
                tail += 1;
            }
            self.frontier.splice(idx..tail, [(c.hkey, c.qhi)]);
        }
        self.kept.push(c);
        if self.kept.len() >= 16384 {
            self.prune();
        }
    }

    fn prune(&mut self) {
        let frontier = std::mem::take(&mut self.frontier);
        let mut kept = std::mem::take(&mut self.kept);
        kept.retain(|c| {
            let idx = frontier.partition_point(|e| e.0 <= c.hkey);
            idx == 0 || c.qlo <= frontier[idx - 1].1
        });
        self.frontier = frontier;
        self.kept = kept;
    }

    fn merge(mut self, other: Scratch) -> Scratch {
        // merge frontiers conservatively by reinserting
        for c in other.kept {
            self.insert(c);
        }
        self.prune();
        self
    }
}

impl FastProblem {
    fn unit(&self) -> i128 {
        1i128 << self.k
    }

    /// Enumerate the canonical half (first nonzero coordinate of b positive)
    /// of the box [-s, s]^n and return the pruned candidate superset,
    /// sorted by (hkey, qlo, bhat).
    pub(crate) fn enumerate(&self) -> Vec<RawCand> {
        let s = self.s_box;
        let tasks: Vec<(usize, i64)> = (0..self.n)
            .flat_map(|j| (1..=s).map(move |v| (j, v)))
            .collect();
        let scratch = tasks
            .into_par_iter()
            .fold(Scratch::new, |mut sc, (j_star, v)| {
                self.run_task(j_star, v, &mut sc);
                sc
            })
            .reduce(Scratch::new, Scratch::merge);
        let mut out = finalize(scratch);
        out.sort_by(|a, b| {
            (a.hkey, a.qlo, &a.bhat).cmp(&(b.hkey, b.qlo, &b.bhat))
        });
        out
    }

    /// Sub-box with coords[0..j_star] = 0, coords[j_star] = v > 0 and the
    /// remaining coordinates ranging over [-s, s].
    fn run_task(&self, j_star: usize, v: i64, sc: &mut Scratch) {
        let n = self.n;
        let m = self.m;
        let s = self.s_box;
        // partial interval sums per depth: flat [depth][i] pairs
        let depths = n - j_star;
        let mut plo = vec![0i128; depths * m];
        let mut phi = vec![0i128; depths * m];
        let mut coords = vec![0i64; n];
        coords[j_star] = v;

        let add_scaled = |lo: &mut [i128], hi: &mut [i128], j: usize, c: i64, base_lo: &[i128], base_hi: &[i128]| {
            let cl = &self.cols_lo[j];
            let ch = &self.cols_hi[j];
            let c = c as i128;
            if c >= 0 {
                for i in 0..m {
                    lo[i] = base_lo[i] + c * cl[i];
                    hi[i] = base_hi[i] + c * ch[i];
                }
            } else {
                for i in 0..m {
                    lo[i] = base_lo[i] + c * ch[i];
                    hi[i] = base_hi[i] + c * cl[i];
                }
            }
        };

        // depth 0 partial: v * col[j_star]
        {
            let zeros_lo = vec![0i128; m];
            let zeros_hi = vec![0i128; m];
            let (lo0, hi0) = (&mut plo[0..m], &mut phi[0..m]);
            add_scaled(lo0, hi0, j_star, v, &zeros_lo, &zeros_hi);
        }
        // initialize deeper coordinates at -s
        for d in 1..depths {
            let j = j_star + d;
            coords[j] = -s;
            let (head_lo, tail_lo) = plo.split_at_mut(d * m);
            let (head_hi, tail_hi) = phi.split_at_mut(d * m);
            add_scaled(
                &mut tail_lo[0..m],
                &mut tail_hi[0..m],
                j,
                -s,
                &head_lo[(d - 1) * m..d * m],
                &head_hi[(d - 1) * m..d * m],
            );
        }

        loop {
            self.visit(&coords, &plo[(depths - 1) * m..], &phi[(depths - 1) * m..], sc);
            // odometer increment over depths 1..depths (depth 0 fixed at v)
            let mut d = depths;
            loop {
                if d == 1 {
                    return; // exhausted this task
                }
                d -= 1;
                let j = j_star + d;
                if coords[j] < s {
                    coords[j] += 1;
                    // ps[d] += col[j]
                    let cl = &self.cols_lo[j];
                    let ch = &self.cols_hi[j];
                    for i in 0..m {
                        plo[d * m + i] += cl[i];
                        phi[d * m + i] += ch[i];
                    }
                    break;
                }
            }
            // reinitialize deeper depths at -s
            for e in (d + 1)..depths {
                let j = j_star + e;
                coords[j] = -s;
                let (head_lo, tail_lo) = plo.split_at_mut(e * m);
                let (head_hi, tail_hi) = phi.split_at_mut(e * m);
                add_scaled(
                    &mut tail_lo[0..m],
                    &mut tail_hi[0..m],
                    j,
                    -s,
                    &head_lo[(e - 1) * m..e * m],
                    &head_hi[(e - 1) * m..e * m],
                );
            }
        }
    }

    #[inline]
    fn visit(&self, coords: &[i64], rlo: &[i128], rhi: &[i128], sc: &mut Scratch) {
        let hkey = match self.n1 {
            Norm1Fast::Max => coords.iter().map(|c| c.unsigned_abs()).max().unwrap() as i128,
            Norm1Fast::WMax => coords
                .iter()
                .zip(&self.n1_wnum)
                .map(|(c, w)| (c.unsigned_abs() as i128) * w)
                .max()
                .unwrap(),
            Norm1Fast::PowInt { u } => coords
                .iter()
                .map(|c| (c.unsigned_abs() as i128).pow(u))
                .sum(),
        };
        if hkey > self.h_adm {
            return;
        }
        let unit = self.unit();
        let half = unit >> 1;
        let (mut qlo, mut qhi) = (0i128, 0i128);
        match &self.n2 {
            Norm2Fast::Max => {
                for i in 0..self.m {
                    let (dl, dh) = dist_to_grid(rlo[i], rhi[i], unit, half);
                    qlo = qlo.max(dl);
                    qhi = qhi.max(dh);
                }
            }
            Norm2Fast::WMax { wnum, shift } => {
                for i in 0..self.m {
                    let (dl, dh) = dist_to_grid(rlo[i], rhi[i], unit, half);
                    let dl = (dl >> shift) * wnum[i];
                    let dh = ((dh >> shift) + 1) * wnum[i];
                    qlo = qlo.max(dl);
                    qhi = qhi.max(dh);
                }
            }
            Norm2Fast::PowInt { u, shift } => {
                for i in 0..self.m {
                    let (dl, dh) = dist_to_grid(rlo[i], rhi[i], unit, half);
                    qlo += (dl >> shift).pow(*u);
                    qhi += ((dh >> shift) + 1).pow(*u);
                }
            }
            Norm2Fast::Equiv { lo_num, hi_num } => {
                let (mut ml, mut mh) = (0i128, 0i128);
                for i in 0..self.m {
                    let (dl, dh) = dist_to_grid(rlo[i], rhi[i], unit, half);
                    ml = ml.max(dl);
                    mh = mh.max(dh);
                }
                qlo = (ml >> 32) * lo_num;
                qhi = ((mh >> 32) + 1) * hi_num;
            }
        }
        sc.insert(RawCand {
            hkey,
            qlo,
            qhi,
            bhat: coords.to_vec(),
        });
    }
}

/// Certified distance of the interval [lo, hi] (hi - lo < unit) to the
/// nearest multiple of `unit`, as an integer interval.
#[inline]
fn dist_to_grid(lo: i128, hi: i128, unit: i128, half: i128) -> (i128, i128) {
    debug_assert!(hi >= lo && hi - lo < unit);
    let rem = lo.rem_euclid(unit);
    let a = if rem >= half { rem - unit } else { rem };
    let b = a + (hi - lo);
    let dlo = if a <= 0 && b >= 0 {
        0
    } else if a > 0 {
        if b >= unit {
            0
        } else if b >= half {
            a.min(unit - b)
        } else {
            a
        }
    } else {
        -b
    };
    let dhi = if b >= half { half } else { a.abs().max(b.abs()) };
    (dlo, dhi)
}

fn finalize(mut sc: Scratch) -> Vec<RawCand> {
    sc.prune();
    // final sweep: group by height, keep candidates that can still matter,
    // collapse certified-equal ties to the lexicographically smallest
    let mut cands = std::mem::take(&mut sc.kept);
    cands.sort_by(|a, b| (a.hkey, a.qlo, &a.bhat).cmp(&(b.hkey, b.qlo, &b.bhat)));
    let mut out: Vec<RawCand> = Vec::new();
    let mut running: Option<i128> = None; // min qhi over strictly smaller heights
    let mut i = 0;
    while i < cands.len() {
        let mut j = i;
        while j < cands.len() && cands[j].hkey == cands[i].hkey {
            j += 1;
        }
        let group = &cands[i..j];
        let group_min_qhi = group.iter().map(|c| c.qhi).min().unwrap();
        let bound = match running {
            None => group_min_qhi,
            Some(r) => r.min(group_min_qhi),
        };
        let mut kept_exact: Option<&RawCand> = None;
        for c in group {
            if c.qlo > bound {
                continue;
            }
            if c.qlo == c.qhi && c.qlo == group_min_qhi {
                // certified exact value at kernel precision: only the
                // lex-smallest can win the in-group tie-break
                if kept_exact.is_none() {
                    kept_exact = Some(c);
                    out.push(c.clone());
                }
                continue;
            }
            out.push(c.clone());
        }
        running = Some(match running {
            None => group_min_qhi,
            Some(r) => r.min(group_min_qhi),
        });
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_to_grid_cases() {
        let unit = 1i128 << 20;
        let half = unit >> 1;
        // point at zero
        assert_eq!(dist_to_grid(0, 0, unit, half), (0, 0));
        // point at 3 units + 5
        assert_eq!(dist_to_grid(3 * unit + 5, 3 * unit + 5, unit, half), (5, 5));
        // point just below a grid line
        assert_eq!(dist_to_grid(unit - 7, unit - 7, unit, half), (7, 7));
        // interval straddling a grid line
        assert_eq!(dist_to_grid(-3, 4, unit, half), (0, 4));
        // interval at negative side
        assert_eq!(dist_to_grid(-9, -2, unit, half), (2, 9));
        // interval containing the half point
        let (dl, dh) = dist_to_grid(half - 2, half + 3, unit, half);
        assert_eq!(dh, half);
        assert_eq!(dl, (unit - (half + 3)).min(half - 2));
        // wide-ish interval past the next grid point
        let (dl2, dh2) = dist_to_grid(unit - 2, unit + 5, unit, half);
        assert_eq!((dl2, dh2), (0, 5.max(2)));
    }

    #[test]
    fn exhaustive_dist_check() {
        // compare against a brute-force distance over sampled integer points
        let unit = 64i128;
        let half = 32i128;
        for lo in -200..200i128 {
            for w in 0..60i128 {
                let hi = lo + w;
                let (dl, dh) = dist_to_grid(lo, hi, unit, half);
                for x in lo..=hi {
                    let r = x.rem_euclid(unit);
                    let d = r.min(unit - r);
                    assert!(d >= dl && d <= dh, "x={x} in [{lo},{hi}] d={d} not in [{dl},{dh}]");
                }
            }
        }
    }
}
