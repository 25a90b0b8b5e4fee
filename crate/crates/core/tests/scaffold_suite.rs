use num_rational::BigRational;
use proptest::prelude::*;
use trapchain_core::scaffold::{
    constraint, generate_scaffold, nersesjan_check, product_domains, validate_scaffold, Label, ScaffoldConfig,
};
use trapchain_core::targets::TargetVariant;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

// Independent restatement of the ordering constraints on exact rationals.
fn orderings_hold(c: &ScaffoldConfig) -> bool {
    let k = c.depth;
    let d: Vec<_> = c.deltas.iter().map(|&x| q(x)).collect();
    let l: Vec<_> = c.ells.iter().map(|&x| q(x)).collect();
    let m: Vec<_> = c.ms.iter().map(|&x| q(x)).collect();
    let r: Vec<_> = c.rs.iter().map(|&x| q(x)).collect();
    let s: Vec<_> = c.ss.iter().map(|&x| q(x)).collect();
    let t: Vec<_> = c.ts.iter().map(|&x| q(x)).collect();
    let sixteenth = BigRational::new(17.into(), 16.into()) * q(c.delta);
    let mut ok = sixteenth < &l[0] / BigRational::from_integer(8.into());
    for i in 0..k {
        ok &= &d[i] + &l[i] < m[i] && m[i] < &d[i + 1] - &l[i + 1];
        ok &= d[i] < d[i + 1] && l[i] < l[i + 1];
        let neg_t = -t[i].clone();
        ok &= neg_t < -&r[i] - &s[i];
        if i + 1 < k {
            ok &= -&r[i + 1] + &s[i + 1] < neg_t;
            ok &= &r[i + 1] - &s[i + 1] > &r[i] + &s[i];
        }
    }
    ok
}

#[test]
fn grid_of_96_configs_passes() {
    let mut n = 0;
    for delta in [0.1, 0.5, 0.9, 0.99] {
        for depth in 1..=8 {
            for growth in [2.0, 3.0, 10.0] {
                let c = generate_scaffold(delta, depth, growth).unwrap();
                let rep = validate_scaffold(&c);
                assert!(rep.passed(), "{delta} {depth} {growth}: {:?}", rep.failures().collect::<Vec<_>>());
                assert!(nersesjan_check(&c).passed());
                assert!(orderings_hold(&c));
                for l in &c.ells {
                    assert!(17.0 / 16.0 < l / (8.0 * delta));
                }
                n += 1;
            }
        }
    }
    assert_eq!(n, 96);
}

#[test]
fn l1_exceeds_coupling_bound() {
    let c = generate_scaffold(0.5, 3, 3.0).unwrap();
    assert!(c.ells[0] > 4.25);
    let c = generate_scaffold(0.999, 1, 3.0).unwrap();
    assert!(c.ells[0] > 8.4915);
    assert!(generate_scaffold(1.2, 1, 3.0).is_err());
}

#[test]
fn w_bounds_of_domains() {
    let c = generate_scaffold(0.5, 3, 3.0).unwrap();
    let doms = product_domains(&c, TargetVariant::Wandering);
    let g2 = doms.iter().find(|d| d.label == Label::G2).unwrap();
    assert_eq!(g2.w.bound, 2.25);
    assert!(g2.w.closed);
    let b1 = doms.iter().find(|d| d.label == Label::B(1)).unwrap();
    assert_eq!(b1.w.bound, c.ells[0] / (8.0 * 0.5));
    assert!(!b1.w.closed);
    let att = product_domains(&c, TargetVariant::Attracting);
    assert!(!att.iter().any(|d| matches!(d.label, Label::A(_) | Label::L(_))));
}

#[derive(Clone, Copy, Debug)]
enum Mutation {
    MAtLeftCenter,
    MAtRightCenter,
    DeltaRepeat,
    EllShrink,
    RRepeat,
    TIntoA,
    TPastNextA,
}

fn apply(c: &mut ScaffoldConfig, m: Mutation, i: usize) -> &'static str {
    let k = c.depth;
    match m {
        Mutation::MAtLeftCenter => {
            let i = i % k;
            c.ms[i] = c.deltas[i];
            constraint::M_INTERLEAVE
        }
        Mutation::MAtRightCenter => {
            let i = i % k;
            c.ms[i] = c.deltas[i + 1];
            constraint::M_INTERLEAVE
        }
        Mutation::DeltaRepeat => {
            let i = i % k;
            c.deltas[i + 1] = c.deltas[i];
            constraint::DELTAS_INCREASING
        }
        Mutation::EllShrink => {
            let i = i % k;
            c.ells[i + 1] = c.ells[i];
            constraint::ELLS_INCREASING
        }
        Mutation::RRepeat => {
            let i = i % (k - 1);
            c.rs[i + 1] = c.rs[i];
            constraint::R_INCREASING
        }
        Mutation::TIntoA => {
            let i = i % k;
            c.ts[i] = c.rs[i];
            constraint::T_INTERLEAVE
        }
        Mutation::TPastNextA => {
            let i = i % (k - 1);
            c.ts[i] = c.rs[i + 1];
            constraint::T_INTERLEAVE
        }
    }
}

fn mutation() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        Just(Mutation::MAtLeftCenter),
        Just(Mutation::MAtRightCenter),
        Just(Mutation::DeltaRepeat),
        Just(Mutation::EllShrink),
        Just(Mutation::RRepeat),
        Just(Mutation::TIntoA),
        Just(Mutation::TPastNextA),
    ]
}

proptest! {
    #[test]
    fn generated_configs_validate(delta in 0.01f64..0.999, depth in 1usize..10, growth in 1.5f64..20.0) {
        let c = generate_scaffold(delta, depth, growth).unwrap();
        prop_assert!(validate_scaffold(&c).passed());
        prop_assert!(nersesjan_check(&c).passed());
        prop_assert!(orderings_hold(&c));
    }

    #[test]
    fn mutations_are_caught_by_name(delta in 0.05f64..0.95, depth in 2usize..7, m in mutation(), i in 0usize..16) {
        let mut c = generate_scaffold(delta, depth, 3.0).unwrap();
        let name = apply(&mut c, m, i);
        let rep = validate_scaffold(&c);
        prop_assert!(!rep.get(name).unwrap().pass, "{:?} not caught by {}", m, name);
        prop_assert!(!orderings_hold(&c));
    }

    #[test]
    fn report_is_exhaustive(delta in 0.05f64..0.95, depth in 1usize..6) {
        let c = generate_scaffold(delta, depth, 3.0).unwrap();
        let rep = validate_scaffold(&c);
        for name in constraint::ALL {
            prop_assert!(rep.get(name).is_some());
        }
    }
}
