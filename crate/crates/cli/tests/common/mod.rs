#![allow(dead_code)]

use std::path::PathBuf;

use diffops::{DiffOp, FieldSpec, MultiExp, PolyRing, Polynomial};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn ring(p: u64, n: usize) -> PolyRing {
    PolyRing::with_nvars(FieldSpec::new(p).unwrap(), n).unwrap()
}

pub fn coefficient(ring: &PolyRing, rng: &mut ChaCha8Rng) -> diffops::FieldElem {
    let spec = ring.spec();
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-4i64..=4);
    }
    let c = spec.from_i64(num);
    if spec.is_zero_char() && rng.gen_bool(0.25) {
        c.checked_div(&spec.from_i64(rng.gen_range(2i64..=5)))
            .unwrap()
    } else {
        c
    }
}

pub fn random_exp(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> MultiExp {
    let total = rng.gen_range(0..=max_degree);
    let mut e = vec![0u32; n];
    for _ in 0..total {
        e[rng.gen_range(0..n)] += 1;
    }
    MultiExp::new(e)
}

pub fn random_poly(
    ring: &PolyRing,
    rng: &mut ChaCha8Rng,
    max_degree: u32,
    max_terms: usize,
) -> Polynomial {
    let mut f = ring.zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let m = ring.monomial(
            random_exp(rng, ring.nvars(), max_degree),
            coefficient(ring, rng),
        );
        f = f.checked_add(&m).unwrap();
    }
    f
}

fn assemble(
    ring: &PolyRing,
    alphas: Vec<MultiExp>,
    rng: &mut ChaCha8Rng,
    coeff_degree: u32,
) -> DiffOp {
    let mut terms = Vec::new();
    for alpha in alphas {
        let mut f = random_poly(ring, rng, coeff_degree, 3);
        while f.is_zero() {
            f = random_poly(ring, rng, coeff_degree, 3);
        }
        terms.push((alpha, f));
    }
    let mut xi = DiffOp::zero(ring);
    for (alpha, f) in terms {
        xi = xi.checked_add(&DiffOp::term(f, alpha)).unwrap();
    }
    xi
}

/// Random operator with order ≤ `max_order` and coefficient degree ≤ `coeff_degree`.
pub fn random_op(
    ring: &PolyRing,
    rng: &mut ChaCha8Rng,
    max_order: u32,
    coeff_degree: u32,
) -> DiffOp {
    let k = rng.gen_range(1..=4);
    let alphas = (0..k)
        .map(|_| random_exp(rng, ring.nvars(), max_order))
        .collect();
    assemble(ring, alphas, rng, coeff_degree)
}

/// Random operator of order exactly `order`.
pub fn random_op_of_order(
    ring: &PolyRing,
    rng: &mut ChaCha8Rng,
    order: u32,
    coeff_degree: u32,
) -> DiffOp {
    loop {
        let mut alphas: Vec<MultiExp> = (0..rng.gen_range(0..3))
            .map(|_| random_exp(rng, ring.nvars(), order))
            .collect();
        let mut top = vec![0u32; ring.nvars()];
        for _ in 0..order {
            top[rng.gen_range(0..ring.nvars())] += 1;
        }
        alphas.push(MultiExp::new(top));
        let xi = assemble(ring, alphas, rng, coeff_degree);
        if xi.order() == order as i64 {
            return xi;
        }
    }
}

/// Random operator whose divided powers satisfy `α_i < bound`.
pub fn random_op_in_box(
    ring: &PolyRing,
    rng: &mut ChaCha8Rng,
    bound: u32,
    coeff_degree: u32,
) -> DiffOp {
    let k = rng.gen_range(1..=4);
    let alphas = (0..k)
        .map(|_| MultiExp::new((0..ring.nvars()).map(|_| rng.gen_range(0..bound)).collect()))
        .collect();
    assemble(ring, alphas, rng, coeff_degree)
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

/// Golden cases: file name and CLI arguments (without the program name).
/// `{dir}` is replaced by the golden directory.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("normalize_weyl.json", &["--json", "normalize", "d1*x1"]),
    (
        "normalize_power.json",
        &["--json", "normalize", "(x1*d1)^2"],
    ),
    (
        "apply_divided_power.json",
        &["--json", "apply", "d[2]", "--to", "x1^4"],
    ),
    (
        "transpose_standard.json",
        &[
            "--json",
            "--nvars",
            "2",
            "transpose",
            "x1*x2^2*d[1,1] + 1/2*d[0,2]",
        ],
    ),
    (
        "transpose_twisted.json",
        &["--json", "transpose", "x1*d1", "--twist", "x1^2"],
    ),
    (
        "bracket_char3.json",
        &["--char", "3", "--json", "bracket", "d[3]", "x1^3"],
    ),
    ("order.json", &["--json", "order", "x1*d[2] + d1"]),
    (
        "level_char2.json",
        &["--char", "2", "--json", "level", "d[2] + x1*d1"],
    ),
    (
        "matrix_char2.json",
        &["--char", "2", "--json", "matrix", "x1", "--e", "1"],
    ),
    (
        "matrix_char3_two_vars.json",
        &[
            "--char",
            "3",
            "--nvars",
            "2",
            "--json",
            "matrix",
            "x1*d[0,1] + x2^2",
            "--e",
            "1",
        ],
    ),
    (
        "artinian_x2.json",
        &["--json", "artinian", "--exponents", "2"],
    ),
    (
        "artinian_x2_y3.json",
        &["--json", "artinian", "--exponents", "2,3"],
    ),
    (
        "group_pseudoreflections.json",
        &[
            "--vars",
            "s,t",
            "--json",
            "group",
            "--group",
            "{dir}/sign_group.input.json",
            "pseudoreflections",
        ],
    ),
    (
        "group_invariant_check.json",
        &[
            "--vars",
            "s,t",
            "--json",
            "group",
            "--group",
            "{dir}/sign_group.input.json",
            "invariant-check",
            "s*d_t",
        ],
    ),
    (
        "group_reynolds.json",
        &[
            "--vars",
            "s,t",
            "--json",
            "group",
            "--group",
            "{dir}/sign_group.input.json",
            "reynolds",
            "s + s*t + d_s*d_t + d_t",
        ],
    ),
];

pub fn run_case(args: &[&str]) -> (i32, String, String) {
    let dir = golden_dir();
    let dir = dir.to_str().unwrap();
    let args: Vec<String> = std::iter::once("diffops".to_string())
        .chain(args.iter().map(|a| a.replace("{dir}", dir)))
        .collect();
    diffops_cli::main_with_args(args)
}
