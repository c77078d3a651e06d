//! Dormand–Prince 8(5,3) integrator with step-size control, for small
//! fixed-size real systems.
//!
//! Steps are shortened to land exactly on each requested output time, so the
//! solution at output points carries the integrator's own accuracy rather
//! than an interpolant's.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("output times must be finite and monotone in one direction from the start")]
    BadOutputGrid,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Maximum number of accepted plus rejected steps.
    pub max_steps: usize,
    pub initial_step: Option<f64>,
    pub max_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_steps: 5_000_000,
            initial_step: None,
            max_step: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const SAFE: f64 = 0.9;
const FAC_MAX: f64 = 6.0;
const FAC_MIN: f64 = 1.0 / 3.0;

/// `y + h Σ c_i k_i`
fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrates `dy/dt = rhs(t, y)` from `(t0, y0)` and returns the state at
/// every time in `outputs`.
///
/// `scale(y_old, y_new)` gives the per-component error scale; a step is
/// accepted when the weighted RMS error estimate is at most one. Output
/// times must be monotone in the direction of integration; entries equal
/// to `t0` return `y0`.
pub fn integrate<const N: usize, F, S>(
    mut rhs: F,
    scale: S,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    options: &Options,
) -> Result<(Vec<[f64; N]>, Stats), OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: Fn(&[f64; N], &[f64; N]) -> [f64; N],
{
    let Some(&t_end) = outputs.last() else {
        return Ok((Vec::new(), Stats::default()));
    };
    if !t0.is_finite() || outputs.iter().any(|t| !t.is_finite()) {
        return Err(OdeError::BadOutputGrid);
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut last = t0;
    for &t in outputs {
        if (t - last) * dir < 0.0 {
            return Err(OdeError::BadOutputGrid);
        }
        last = t;
    }

    let mut stats = Stats::default();
    let mut eval = |t: f64, y: &[f64; N], stats: &mut Stats| {
        stats.evaluations += 1;
        rhs(t, y)
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = eval(t, &y, &mut stats);
    let mut h = match options.initial_step {
        Some(h0) => h0.abs().min(options.max_step),
        None => initial_step(&mut eval, &scale, t, &y, &k1, dir, options.max_step, &mut stats),
    };
    let mut last_rejected = false;
    let mut out = Vec::with_capacity(outputs.len());

    for &target in outputs {
        while (target - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= options.max_steps {
                return Err(OdeError::TooManySteps {
                    t,
                    max_steps: options.max_steps,
                });
            }
            let remaining = (target - t).abs();
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step <= 10.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
                return Err(OdeError::StepUnderflow { t, h: step });
            }
            let hs = dir * step;

            let k2 = eval(t + C2 * hs, &combine(&y, hs, &[(A21, &k1)]), &mut stats);
            let k3 = eval(t + C3 * hs, &combine(&y, hs, &[(A31, &k1), (A32, &k2)]), &mut stats);
            let k4 = eval(t + C4 * hs, &combine(&y, hs, &[(A41, &k1), (A43, &k3)]), &mut stats);
            let k5 = eval(
                t + C5 * hs,
                &combine(&y, hs, &[(A51, &k1), (A53, &k3), (A54, &k4)]),
                &mut stats,
            );
            let k6 = eval(
                t + C6 * hs,
                &combine(&y, hs, &[(A61, &k1), (A64, &k4), (A65, &k5)]),
                &mut stats,
            );
            let k7 = eval(
                t + C7 * hs,
                &combine(&y, hs, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]),
                &mut stats,
            );
            let k8 = eval(
                t + C8 * hs,
                &combine(&y, hs, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]),
                &mut stats,
            );
            let k9 = eval(
                t + C9 * hs,
                &combine(
                    &y,
                    hs,
                    &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)],
                ),
                &mut stats,
            );
            let k10 = eval(
                t + C10 * hs,
                &combine(
                    &y,
                    hs,
                    &[
                        (A101, &k1),
                        (A104, &k4),
                        (A105, &k5),
                        (A106, &k6),
                        (A107, &k7),
                        (A108, &k8),
                        (A109, &k9),
                    ],
                ),
                &mut stats,
            );
            let k11 = eval(
                t + C11 * hs,
                &combine(
                    &y,
                    hs,
                    &[
                        (A111, &k1),
                        (A114, &k4),
                        (A115, &k5),
                        (A116, &k6),
                        (A117, &k7),
                        (A118, &k8),
                        (A119, &k9),
                        (A1110, &k10),
                    ],
                ),
                &mut stats,
            );
            let t_new = if clipped { target } else { t + hs };
            let k12 = eval(
                t_new,
                &combine(
                    &y,
                    hs,
                    &[
                        (A121, &k1),
                        (A124, &k4),
                        (A125, &k5),
                        (A126, &k6),
                        (A127, &k7),
                        (A128, &k8),
                        (A129, &k9),
                        (A1210, &k10),
                        (A1211, &k11),
                    ],
                ),
                &mut stats,
            );

            let mut slope = [0.0; N];
            for i in 0..N {
                slope[i] = B1 * k1[i]
                    + B6 * k6[i]
                    + B7 * k7[i]
                    + B8 * k8[i]
                    + B9 * k9[i]
                    + B10 * k10[i]
                    + B11 * k11[i]
                    + B12 * k12[i];
            }
            let y_new = combine(&y, hs, &[(1.0, &slope)]);
            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(OdeError::NonFinite { t: t_new });
            }

            let sk = scale(&y, &y_new);
            let mut err5 = 0.0;
            let mut err3 = 0.0;
            for i in 0..N {
                let e3 = slope[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
                let e5 = ER1 * k1[i]
                    + ER6 * k6[i]
                    + ER7 * k7[i]
                    + ER8 * k8[i]
                    + ER9 * k9[i]
                    + ER10 * k10[i]
                    + ER11 * k11[i]
                    + ER12 * k12[i];
                err3 += (e3 / sk[i]).powi(2);
                err5 += (e5 / sk[i]).powi(2);
            }
            let mut deno = err5 + 0.01 * err3;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = step * err5 * (1.0 / (N as f64 * deno)).sqrt();
            if !err.is_finite() {
                return Err(OdeError::NonFinite { t });
            }

            let fac11 = err.powf(0.125);
            let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            if err <= 1.0 {
                stats.accepted += 1;
                let mut h_new = step / fac;
                if last_rejected {
                    h_new = h_new.min(step);
                }
                last_rejected = false;
                t = t_new;
                y = y_new;
                k1 = eval(t, &y, &mut stats);
                // a clipped step says nothing about the largest stable step
                h = if clipped { h.max(h_new) } else { h_new };
                h = h.min(options.max_step);
            } else {
                stats.rejected += 1;
                last_rejected = true;
                h = step / (fac11 / SAFE).min(1.0 / FAC_MIN);
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[allow(clippy::too_many_arguments)]
fn initial_step<const N: usize, F, S>(
    eval: &mut F,
    scale: &S,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    max_step: f64,
    stats: &mut Stats,
) -> f64
where
    F: FnMut(f64, &[f64; N], &mut Stats) -> [f64; N],
    S: Fn(&[f64; N], &[f64; N]) -> [f64; N],
{
    let sk = scale(y, y);
    let n = N as f64;
    let rms = |v: &[f64; N]| (v.iter().zip(&sk).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n).sqrt();
    let dnf = rms(f0);
    let dny = rms(y);
    let mut h = if dnf <= 1e-5 || dny <= 1e-5 {
        1e-6
    } else {
        0.01 * dny / dnf
    };
    h = h.min(max_step);
    let y1 = combine(y, dir * h, &[(1.0, f0)]);
    let f1 = eval(t + dir * h, &y1, stats);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let der2 = rms(&diff) / h;
    let der12 = der2.max(dnf);
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    (100.0 * h).min(h1).min(max_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_scale(tol: f64) -> impl Fn(&[f64; 2], &[f64; 2]) -> [f64; 2] {
        move |a, b| {
            let m = a[0].hypot(a[1]).max(b[0].hypot(b[1]));
            [tol * m, tol * m]
        }
    }

    #[test]
    fn harmonic_oscillator_lands_on_outputs() {
        let w = 3.0;
        let outputs: Vec<f64> = (0..=50).map(|i| i as f64 * 0.37).collect();
        let (ys, stats) = integrate(
            |_, y| [y[1], -w * w * y[0]],
            |a: &[f64; 2], b: &[f64; 2]| {
                let m = (a[0].abs() + a[1].abs() / w).max(b[0].abs() + b[1].abs() / w);
                [1e-12 * m, 1e-12 * m * w]
            },
            0.0,
            [1.0, 0.0],
            &outputs,
            &Options::default(),
        )
        .unwrap();
        assert_eq!(ys.len(), outputs.len());
        for (t, y) in outputs.iter().zip(&ys) {
            assert!((y[0] - (w * t).cos()).abs() < 1e-10, "t={t}");
            assert!((y[1] + w * (w * t).sin()).abs() < 1e-9, "t={t}");
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn backward_integration() {
        // y' = y, integrate from t = 1 back to t = 0
        let (ys, _) = integrate(
            |_, y: &[f64; 2]| [y[0], y[1]],
            rel_scale(1e-12),
            1.0,
            [1f64.exp(), 0.0],
            &[0.5, 0.0],
            &Options::default(),
        )
        .unwrap();
        assert!((ys[0][0] - 0.5f64.exp()).abs() < 1e-11);
        assert!((ys[1][0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn eighth_order_convergence() {
        // global error of y' = -y over [0, 1] drops by ~2^8 when h halves
        let run = |h: f64| {
            let (ys, _) = integrate(
                |_, y: &[f64; 2]| [-y[0], 0.0],
                |_: &[f64; 2], _: &[f64; 2]| [1e300, 1e300],
                0.0,
                [1.0, 0.0],
                &[1.0],
                &Options {
                    initial_step: Some(h),
                    max_step: h,
                    ..Options::default()
                },
            )
            .unwrap();
            (ys[0][0] - (-1f64).exp()).abs()
        };
        let ratio = run(0.5) / run(0.25);
        assert!(ratio > 150.0 && ratio < 600.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_non_monotone_outputs() {
        let r = integrate(
            |_, y: &[f64; 2]| *y,
            rel_scale(1e-8),
            0.0,
            [1.0, 0.0],
            &[1.0, 0.5],
            &Options::default(),
        );
        assert_eq!(r.unwrap_err(), OdeError::BadOutputGrid);
    }

    #[test]
    fn blow_up_reports_failure_time() {
        // y' = y², y(0) = 1 blows up at t = 1
        let r = integrate(
            |_, y: &[f64; 2]| [y[0] * y[0], 0.0],
            rel_scale(1e-10),
            0.0,
            [1.0, 0.0],
            &[2.0],
            &Options::default(),
        );
        match r {
            Err(OdeError::StepUnderflow { t, .. }) | Err(OdeError::NonFinite { t }) | Err(OdeError::TooManySteps { t, .. }) => {
                assert!(t > 0.9 && t <= 1.0 + 1e-6, "t = {t}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
