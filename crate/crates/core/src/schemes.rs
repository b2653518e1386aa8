//! Splitting scheme coefficient tables and composition utilities.
//!
//! A scheme is a sequence of real coefficient pairs `(aᵢ, bᵢ)`; one step of
//! size `t` applies `E_A(aᵢ t)` then `E_B(bᵢ t)` for `i = 1..s`. Consistency
//! requires `Σaᵢ = Σbᵢ = 1`.

use crate::{Error, Result};

/// Named splitting coefficient table with its nominal order.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingScheme {
    pub name: String,
    pub order: u32,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SplittingScheme {
    pub fn new(name: impl Into<String>, order: u32, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidParams(format!(
                "coefficient sequences must be non-empty and equally long (got {} and {})",
                a.len(),
                b.len()
            )));
        }
        Ok(SplittingScheme {
            name: name.into(),
            order,
            a,
            b,
        })
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }

    /// `Σaᵢ` and `Σbᵢ` both within 1e-12 of 1.
    pub fn check_consistency(&self) -> bool {
        let sa: f64 = self.a.iter().sum();
        let sb: f64 = self.b.iter().sum();
        (sa - 1.0).abs() <= 1e-12 && (sb - 1.0).abs() <= 1e-12
    }
}

/// Names accepted by [`builtin_scheme`].
pub const BUILTIN_SCHEMES: [&str; 5] = ["lie", "strang", "ruth3", "yoshida4", "auz5"];

/// Returns a built-in coefficient table by name.
///
/// - `lie`: 1 stage, order 1
/// - `strang`: symmetric 2-stage form `a = (½, ½)`, `b = (1, 0)`, order 2
/// - `ruth3`: 3-stage third-order scheme
/// - `yoshida4`: 4-stage fourth-order triple-jump composition of `strang`
/// - `auz5`: 7-stage fifth-order scheme
pub fn builtin_scheme(name: &str) -> Result<SplittingScheme> {
    match name {
        "lie" => SplittingScheme::new("lie", 1, vec![1.0], vec![1.0]),
        "strang" => SplittingScheme::new("strang", 2, vec![0.5, 0.5], vec![1.0, 0.0]),
        "ruth3" => SplittingScheme::new(
            "ruth3",
            3,
            vec![7.0 / 24.0, 3.0 / 4.0, -1.0 / 24.0],
            vec![2.0 / 3.0, -2.0 / 3.0, 1.0],
        ),
        "yoshida4" => {
            let w1 = 1.0 / (2.0 - 2.0_f64.powf(1.0 / 3.0));
            let w0 = 1.0 - 2.0 * w1;
            SplittingScheme::new(
                "yoshida4",
                4,
                vec![0.5 * w1, 0.5 * (w0 + w1), 0.5 * (w0 + w1), 0.5 * w1],
                vec![w1, w0, w1, 0.0],
            )
        }
        "auz5" => SplittingScheme::new(
            "auz5",
            5,
            vec![
                0.475018345144539497,
                0.021856594741098449,
                -0.334948298035883491,
                0.512638174652696736,
                -0.011978701020553904,
                -0.032120004263046859,
                0.369533888781149572,
            ],
            vec![
                -0.402020995028838599,
                0.345821780864741783,
                0.400962967485371350,
                0.980926531879316517,
                -1.362064898669775625,
                0.923805029000837468,
                0.112569584468347105,
            ],
        ),
        other => Err(Error::UnknownScheme(other.to_string())),
    }
}

/// Symmetric triple-jump composition: three sub-steps of `base` with weights
/// `γ₁ = γ₃ = 1/(2 - 2^{1/(p+1)})`, `γ₂ = 1 - 2γ₁`, raising an even order `p`
/// to `p + 2`. Adjacent flows of the same kind are merged (both sub-flows
/// form groups in `t`, so the merge is exact).
pub fn triple_jump(base: &SplittingScheme) -> Result<SplittingScheme> {
    if !base.order.is_multiple_of(2) {
        return Err(Error::OddOrderBase(base.order));
    }
    let g1 = 1.0 / (2.0 - 2.0_f64.powf(1.0 / (base.order as f64 + 1.0)));
    let gammas = [g1, 1.0 - 2.0 * g1, g1];

    #[derive(PartialEq, Clone, Copy)]
    enum Kind {
        A,
        B,
    }
    let mut ops: Vec<(Kind, f64)> = Vec::new();
    for gamma in gammas {
        for (&ai, &bi) in base.a.iter().zip(&base.b) {
            for (kind, c) in [(Kind::A, gamma * ai), (Kind::B, gamma * bi)] {
                if c == 0.0 {
                    continue;
                }
                match ops.last_mut() {
                    Some((k, acc)) if *k == kind => *acc += c,
                    _ => ops.push((kind, c)),
                }
            }
        }
    }

    // repack into (a, b) stage pairs, inserting zero-size flows as needed
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut iter = ops.into_iter().peekable();
    while let Some((kind, c)) = iter.next() {
        match kind {
            Kind::A => {
                a.push(c);
                match iter.peek() {
                    Some((Kind::B, _)) => b.push(iter.next().unwrap().1),
                    _ => b.push(0.0),
                }
            }
            Kind::B => {
                a.push(0.0);
                b.push(c);
            }
        }
    }

    SplittingScheme::new(format!("triple_jump({})", base.name), base.order + 2, a, b)
}

/// The repository-wide reference integrator: the order-6 double triple-jump
/// composition of Strang. Local errors in scans and tests are measured
/// against this scheme run at a much smaller step.
pub fn reference_scheme() -> SplittingScheme {
    let tj4 =
        triple_jump(&builtin_scheme("strang").expect("builtin")).expect("strang has even order");
    let mut tj6 = triple_jump(&tj4).expect("even order");
    tj6.name = "ref6".into();
    tj6
}
