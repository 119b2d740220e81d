//! Table-driven collision sweeps over whole grids.
//!
//! The collision integral is local in x, and on a uniform v-grid the delta
//! root A depends only on the index differences d1 = j1 - j, d2 = j2 - j and
//! the angle. Everything that does not depend on the base index — the gate,
//! the quadrature weight, and the interpolation stencils for v3, v4, v5 — is
//! precomputed once per quadrature spec into a triple table. A grid sweep then
//! reduces to contiguous fused multiply-adds over padded columns, and its
//! result matches the direct quadrature of the parent module to rounding for
//! grid-backed fields evaluated at on-grid x.
//!
//! Because the integrand of every solver path is symmetric under the swap
//! (v1, omega1) <-> (v2, omega2) — all slots hold the same field — the table
//! keeps one representative per swap orbit with doubled weight, halving the
//! sweep cost. The swap maps the midpoint angle theta to pi/2 - theta, which
//! is again a midpoint node when n_theta is divisible by 4; otherwise the
//! table is built unfolded.

use crate::field::{GridData, GridSpec};
use crate::quadrature::QuadratureSpec;
use rayon::prelude::*;

use super::gate;

#[derive(Clone, Copy)]
struct Triple {
    /// Padded base offsets pad + floor(delta) for the v3, v4, v5 stencils.
    o3: u32,
    o4: u32,
    o5: u32,
    /// Interpolation fractions.
    t3: f64,
    t4: f64,
    t5: f64,
    /// Full quadrature weight: fold * gate * w_theta * hv^2 / (1 + w1 w2).
    w: f64,
}

struct Group {
    d1: i32,
    d2: i32,
    triples: Vec<Triple>,
}

/// Precomputed angular/velocity quadrature data for one grid resolution.
pub struct TripleTable {
    grid: GridSpec,
    pad: usize,
    /// Trapezoid node weights along v (0.5 at the ends).
    wv: Vec<f64>,
    groups: Vec<Group>,
}

impl TripleTable {
    pub fn build(q: &QuadratureSpec) -> Self {
        let grid = q.grid;
        let nv = grid.nv as i32;
        let hv = grid.hv();
        let n = q.n_theta;
        let wt = q.theta_weight();
        let folded = n % 4 == 0;

        let angles: Vec<(f64, f64, f64)> = q
            .thetas()
            .map(|t| {
                let (s, c) = t.sin_cos();
                (c, s, 1.0 + c * s)
            })
            .collect();

        // First pass with raw floor offsets; padding fixed up afterwards.
        let mut raw: Vec<(i32, i32, Vec<(i32, i32, i32, Triple)>)> = Vec::new();
        let mut min_off = 0i32;
        let mut max_off = 0i32;
        for d1 in -(nv - 1)..nv {
            for d2 in -(nv - 1)..nv {
                if folded && d1 > d2 {
                    continue;
                }
                let mut triples = Vec::new();
                for (m, &(c, s, denom)) in angles.iter().enumerate() {
                    let fold = if folded {
                        let m_p = (n as i32 / 4 - 1 - m as i32).rem_euclid(n as i32) as usize;
                        if d1 == d2 && m > m_p {
                            continue;
                        }
                        if d1 < d2 || m < m_p {
                            2.0
                        } else {
                            1.0
                        }
                    } else {
                        1.0
                    };
                    let a = (c * d1 as f64 + s * d2 as f64) / denom;
                    let gt = gate(a);
                    if gt == 0.0 {
                        continue;
                    }
                    let d3 = d1 as f64 - a * c;
                    let d4 = d2 as f64 - a * s;
                    let d5 = a * (c + s);
                    // Snap near-integer offsets so that axis-aligned angles
                    // (stencil points exactly on grid nodes) take the t = 0
                    // path instead of straddling a node by rounding fuzz,
                    // with the same tolerance the bilinear evaluator uses.
                    let snap = |d: f64| {
                        let r = d.round();
                        if (d - r).abs() < crate::field::NODE_SNAP {
                            r
                        } else {
                            d
                        }
                    };
                    let (d3, d4, d5) = (snap(d3), snap(d4), snap(d5));
                    let i3 = d3.floor() as i32;
                    let i4 = d4.floor() as i32;
                    let i5 = d5.floor() as i32;
                    min_off = min_off.min(i3).min(i4).min(i5);
                    max_off = max_off.max(i3).max(i4).max(i5);
                    triples.push((
                        i3,
                        i4,
                        i5,
                        Triple {
                            o3: 0,
                            o4: 0,
                            o5: 0,
                            t3: d3 - i3 as f64,
                            t4: d4 - i4 as f64,
                            t5: d5 - i5 as f64,
                            w: fold * gt * wt * hv * hv / denom,
                        },
                    ));
                }
                if !triples.is_empty() {
                    raw.push((d1, d2, triples));
                }
            }
        }

        let pad = ((-min_off).max(0) + 1).max(max_off + 2) as usize;
        let groups = raw
            .into_iter()
            .map(|(d1, d2, triples)| Group {
                d1,
                d2,
                triples: triples
                    .into_iter()
                    .map(|(i3, i4, i5, mut t)| {
                        t.o3 = (i3 + pad as i32) as u32;
                        t.o4 = (i4 + pad as i32) as u32;
                        t.o5 = (i5 + pad as i32) as u32;
                        t
                    })
                    .collect(),
            })
            .collect();

        let mut wv = vec![1.0; grid.nv];
        wv[0] = 0.5;
        wv[grid.nv - 1] = 0.5;

        Self {
            grid,
            pad,
            wv,
            groups,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// C6[f] = gain - loss at every node.
    pub fn collide_grid(&self, f: &GridData) -> GridData {
        let [out] = self.sweep(f, |f0, g1, h2, k3, l4, m5| {
            [k3 * l4 * m5 * (f0 * g1 + f0 * h2 + g1 * h2)
                - f0 * g1 * h2 * (k3 * (l4 + m5) + l4 * m5)]
        });
        out
    }

    /// Gain part G[f] at every node.
    pub fn gain_grid(&self, f: &GridData) -> GridData {
        let [out] = self.sweep(f, |f0, g1, h2, k3, l4, m5| {
            [k3 * l4 * m5 * (f0 * g1 + f0 * h2 + g1 * h2)]
        });
        out
    }

    /// Loss rate R[f, f, f, f, f] at every node (no leading-f factor).
    pub fn rate_grid(&self, f: &GridData) -> GridData {
        let [out] = self.sweep(f, |_f0, g1, h2, k3, l4, m5| {
            [g1 * h2 * (k3 * (l4 + m5) + l4 * m5)]
        });
        out
    }

    /// Gain and loss rate together, sharing one pass over the table.
    pub fn gain_and_rate_grid(&self, f: &GridData) -> (GridData, GridData) {
        let [gain, rate] = self.sweep(f, |f0, g1, h2, k3, l4, m5| {
            let klm = k3 * l4 * m5;
            let r = k3 * (l4 + m5) + l4 * m5;
            [klm * (f0 * g1 + f0 * h2 + g1 * h2), g1 * h2 * r]
        });
        (gain, rate)
    }

    fn sweep<const N: usize, F>(&self, f: &GridData, term: F) -> [GridData; N]
    where
        F: Fn(f64, f64, f64, f64, f64, f64) -> [f64; N] + Sync,
    {
        assert_eq!(f.spec, self.grid, "field grid must match the table grid");
        let nv = self.grid.nv;
        let pad = self.pad;
        let columns: Vec<[Vec<f64>; N]> = (0..self.grid.nx)
            .into_par_iter()
            .map(|i| {
                let col = &f.values[i * nv..(i + 1) * nv];
                let mut out_cols: [Vec<f64>; N] =
                    std::array::from_fn(|_| vec![0.0; nv]);
                let mut padded = vec![0.0; nv + 2 * pad];
                padded[pad..pad + nv].copy_from_slice(col);
                for grp in &self.groups {
                    let lo = 0.max(-grp.d1).max(-grp.d2) as usize;
                    let hi = (nv as i32 - 1)
                        .min(nv as i32 - 1 - grp.d1)
                        .min(nv as i32 - 1 - grp.d2);
                    if (hi as usize) < lo || hi < 0 {
                        continue;
                    }
                    let len = hi as usize - lo + 1;
                    let cf = &col[lo..lo + len];
                    let s1 = (lo as i32 + grp.d1) as usize;
                    let s2 = (lo as i32 + grp.d2) as usize;
                    let cg = &col[s1..s1 + len];
                    let ch = &col[s2..s2 + len];
                    let wg = &self.wv[s1..s1 + len];
                    let wh = &self.wv[s2..s2 + len];
                    for tr in &grp.triples {
                        let pk = &padded[lo + tr.o3 as usize..][..len + 1];
                        let pl = &padded[lo + tr.o4 as usize..][..len + 1];
                        let pm = &padded[lo + tr.o5 as usize..][..len + 1];
                        let (t3, t4, t5, w) = (tr.t3, tr.t4, tr.t5, tr.w);
                        let (u3, u4, u5) = (1.0 - t3, 1.0 - t4, 1.0 - t5);
                        for jj in 0..len {
                            let k3 = u3 * pk[jj] + t3 * pk[jj + 1];
                            let l4 = u4 * pl[jj] + t4 * pl[jj + 1];
                            let m5 = u5 * pm[jj] + t5 * pm[jj + 1];
                            let ws = w * wg[jj] * wh[jj];
                            let vals = term(cf[jj], cg[jj], ch[jj], k3, l4, m5);
                            for (o, v) in out_cols.iter_mut().zip(vals) {
                                o[lo + jj] += ws * v;
                            }
                        }
                        // Zero extension is a hard cutoff at the box edge,
                        // while the smooth stencil above decays linearly into
                        // the padding. They disagree only where a stencil
                        // straddles the edge — at most two base indices per
                        // slot — so patch those exactly.
                        let offs = [
                            (tr.o3 as i32 - pad as i32, t3),
                            (tr.o4 as i32 - pad as i32, t4),
                            (tr.o5 as i32 - pad as i32, t5),
                        ];
                        let mut specials = [0i32; 6];
                        let mut ns = 0;
                        for &(i_off, t) in &offs {
                            if t != 0.0 {
                                for jb in [nv as i32 - 1 - i_off, -1 - i_off] {
                                    if jb >= lo as i32
                                        && jb <= hi
                                        && !specials[..ns].contains(&jb)
                                    {
                                        specials[ns] = jb;
                                        ns += 1;
                                    }
                                }
                            }
                        }
                        for &jb in &specials[..ns] {
                            let jj = (jb - lo as i32) as usize;
                            let slot = |i_off: i32, t: f64, p: &[f64]| {
                                let s = (1.0 - t) * p[jj] + t * p[jj + 1];
                                let base = jb + i_off;
                                if base >= 0 && (t == 0.0 || base < nv as i32 - 1) {
                                    (s, s)
                                } else {
                                    (s, 0.0)
                                }
                            };
                            let (k3s, k3e) = slot(offs[0].0, t3, pk);
                            let (l4s, l4e) = slot(offs[1].0, t4, pl);
                            let (m5s, m5e) = slot(offs[2].0, t5, pm);
                            let ws = w * wg[jj] * wh[jj];
                            let exact = term(cf[jj], cg[jj], ch[jj], k3e, l4e, m5e);
                            let smooth = term(cf[jj], cg[jj], ch[jj], k3s, l4s, m5s);
                            for (o, (e, s)) in
                                out_cols.iter_mut().zip(exact.into_iter().zip(smooth))
                            {
                                o[lo + jj] += ws * (e - s);
                            }
                        }
                    }
                }
                out_cols
            })
            .collect();
        let mut out: [GridData; N] = std::array::from_fn(|_| GridData::zeros(self.grid));
        for (i, cols) in columns.into_iter().enumerate() {
            for (o, c) in out.iter_mut().zip(cols) {
                o.values[i * nv..(i + 1) * nv].copy_from_slice(&c);
            }
        }
        out
    }
}
