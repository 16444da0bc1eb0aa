//! Paired Student t-test with the two-sided p-value taken from the
//! regularized incomplete beta function.

use super::Evaluation;
use crate::error::EvalError;
use crate::scalar::Scalar;

/// Outcome of a paired t-test on `a - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest<S> {
    pub n: usize,
    pub df: usize,
    pub mean_diff: S,
    pub t: S,
    /// Two-sided.
    pub p: S,
    /// All differences are equal and non-zero, so `t` is infinite.
    pub degenerate: bool,
}

impl<S: Scalar> TTest<S> {
    pub fn significant(&self, threshold: f64) -> bool {
        self.p.as_f64() < threshold
    }
}

pub fn paired_t_test<S: Scalar>(a: &[S], b: &[S]) -> Result<TTest<S>, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(EvalError::TooFewPairs(n));
    }
    let diffs: Vec<S> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let nf = S::from_count(n as u64);
    let mean = diffs.iter().copied().sum::<S>() / nf;
    let ss = diffs.iter().map(|&d| (d - mean) * (d - mean)).sum::<S>();
    let sd = (ss / (nf - S::one())).sqrt();
    let df = n - 1;
    if sd.is_zero() {
        if mean.is_zero() {
            return Ok(TTest {
                n,
                df,
                mean_diff: mean,
                t: S::zero(),
                p: S::one(),
                degenerate: false,
            });
        }
        let t = if mean > S::zero() {
            S::infinity()
        } else {
            S::neg_infinity()
        };
        return Ok(TTest {
            n,
            df,
            mean_diff: mean,
            t,
            p: S::zero(),
            degenerate: true,
        });
    }
    let t = mean / (sd / nf.sqrt());
    let p = student_t_two_sided(t, S::from_count(df as u64));
    Ok(TTest {
        n,
        df,
        mean_diff: mean,
        t,
        p,
        degenerate: false,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided<S: Scalar>(t: S, df: S) -> S {
    if t.is_infinite() {
        return S::zero();
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(df / S::lit(2.0), S::lit(0.5), x)
}

/// Paired comparison of two evaluated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// `(qid, ap_a, ap_b)` in qid order.
    pub pairs: Vec<(String, f64, f64)>,
    pub map_a: f64,
    pub map_b: f64,
    pub test: TTest<f64>,
}

impl Comparison {
    pub fn map_delta(&self) -> f64 {
        self.map_a - self.map_b
    }
}

/// Pairs per-query AP by qid and runs the t-test. Both evaluations must
/// cover the same queries.
pub fn compare_evaluations(a: &Evaluation, b: &Evaluation) -> Result<Comparison, EvalError> {
    let qa: Vec<&str> = a.queries.iter().map(|q| q.qid.as_str()).collect();
    let qb: Vec<&str> = b.queries.iter().map(|q| q.qid.as_str()).collect();
    let only = |x: &[&str], y: &[&str]| -> Vec<String> {
        x.iter()
            .filter(|q| !y.contains(q))
            .map(|q| (*q).to_owned())
            .collect()
    };
    let (only_a, only_b) = (only(&qa, &qb), only(&qb, &qa));
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(EvalError::QueryMismatch { only_a, only_b });
    }
    let pairs: Vec<(String, f64, f64)> = a
        .queries
        .iter()
        .map(|q| (q.qid.clone(), q.ap, b.ap_of(&q.qid).unwrap_or_default()))
        .collect();
    let xs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    let test = paired_t_test(&xs, &ys)?;
    Ok(Comparison {
        pairs,
        map_a: a.map,
        map_b: b.map,
        test,
    })
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma<S: Scalar>(x: S) -> S {
    let half = S::lit(0.5);
    if x < half {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let pi = S::lit(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(S::one() - x);
    }
    let x = x - S::one();
    let mut acc = S::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + S::lit(c) / (x + S::from_count(i as u64));
    }
    let t = x + S::lit(LANCZOS_G) + half;
    S::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

/// I_x(a, b), the regularized incomplete beta function, for a, b > 0 and
/// x in [0, 1].
pub fn regularized_incomplete_beta<S: Scalar>(a: S, b: S, x: S) -> S {
    if x <= S::zero() {
        return S::zero();
    }
    if x >= S::one() {
        return S::one();
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (S::one() - x).ln();
    let front = ln_front.exp();
    // The continued fraction converges fast for x < (a+1)/(a+b+2).
    if x < (a + S::one()) / (a + b + S::lit(2.0)) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        S::one() - front * beta_continued_fraction(b, a, S::one() - x) / b
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction<S: Scalar>(a: S, b: S, x: S) -> S {
    const MAX_ITER: u64 = 500;
    let eps = S::epsilon();
    let tiny = S::min_positive_value() / eps;
    let one = S::one();
    let two = S::lit(2.0);
    let guard = |v: S| if v.abs() < tiny { tiny } else { v };

    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one / guard(one - qab * x / qap);
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = S::from_count(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one / guard(one + aa * d);
        c = guard(one + aa / c);
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one / guard(one + aa * d);
        c = guard(one + aa / c);
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() <= eps {
            break;
        }
    }
    h
}
