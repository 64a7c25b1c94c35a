//! Reference turning-point detection, written as plain loops over index lists.

#![allow(clippy::needless_range_loop, clippy::implicit_saturating_sub)]

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tp {
    pub t: usize,
    pub peak: bool,
}

pub fn candidates(v: &[f64], l: usize) -> Vec<Tp> {
    let last = v.len() - 1;
    let mut out: Vec<Tp> = Vec::new();
    for t0 in 0..v.len() {
        let lo = if t0 >= l { t0 - l } else { 0 };
        let hi = if t0 + l <= last { t0 + l } else { last };
        let mut wmax = v[lo];
        let mut wmin = v[lo];
        for t in lo..=hi {
            if v[t] > wmax {
                wmax = v[t];
            }
            if v[t] < wmin {
                wmin = v[t];
            }
        }
        if wmax == wmin {
            continue;
        }
        let is_peak = v[t0] == wmax;
        let is_trough = v[t0] == wmin;
        if !is_peak && !is_trough {
            continue;
        }
        if out.is_empty() {
            out.push(Tp {
                t: t0,
                peak: is_peak,
            });
            continue;
        }
        let k = out.len() - 1;
        let prev = out[k];
        if prev.peak {
            if is_trough && v[t0] < v[prev.t] {
                out.push(Tp { t: t0, peak: false });
            } else if is_peak && v[t0] > v[prev.t] {
                out[k] = Tp { t: t0, peak: true };
            }
        } else if is_peak && v[t0] > v[prev.t] {
            out.push(Tp { t: t0, peak: true });
        } else if is_trough && v[t0] < v[prev.t] {
            out[k] = Tp { t: t0, peak: false };
        }
    }
    out
}

pub fn refine(v: &[f64], mut tps: Vec<Tp>, delta: f64, eps: f64) -> Vec<Tp> {
    // Peak ratio: repeatedly find the first offending consecutive-peak pair.
    'ratio: loop {
        let peaks: Vec<usize> = (0..tps.len()).filter(|&i| tps[i].peak).collect();
        for w in peaks.windows(2) {
            let (p1, p3) = (w[0], w[1]);
            if v[tps[p1].t] > 0.0 && v[tps[p3].t] / v[tps[p1].t] < delta {
                tps.remove(p3);
                if p3 < tps.len() && !tps[p3 - 1].peak && !tps[p3].peak {
                    if v[tps[p3 - 1].t] > v[tps[p3].t] {
                        tps.remove(p3 - 1);
                    } else {
                        tps.remove(p3);
                    }
                }
                continue 'ratio;
            }
        }
        break;
    }
    // Log gradient: repeatedly find the first flat adjacent pair.
    'grad: loop {
        for i in 0..tps.len().saturating_sub(1) {
            let (a, b) = (v[tps[i].t], v[tps[i + 1].t]);
            let g = if a > 0.0 && b > 0.0 {
                (b.ln() - a.ln()).abs() / (tps[i + 1].t - tps[i].t) as f64
            } else {
                f64::INFINITY
            };
            if g < eps {
                let last = i + 1 == tps.len() - 1;
                tps.remove(i + 1);
                if !last {
                    tps.remove(i);
                    continue 'grad;
                }
                break 'grad;
            }
        }
        break;
    }
    tps
}

pub fn run(series: &[f64], l: usize, delta: f64, eps: f64) -> Vec<Tp> {
    let m = series.iter().cloned().fold(f64::INFINITY, f64::min);
    let v: Vec<f64> = series.iter().map(|x| x - m).collect();
    let c = candidates(&v, l);
    refine(&v, c, delta, eps)
}
