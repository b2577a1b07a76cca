mod support;

use ordpde::baire::INTERIOR_MARGIN;
use ordpde::{interface_value, is_normal_lsc, lower_baire, nlsc_regularize, upper_baire};
use ordpde::{Domain, ExtReal, Grid, GridFn, Piece, TiledFn, Tiles};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{brute_envelope, interface_brute, random_field};

fn grid(nx: usize, ny: usize) -> Grid {
    Grid::new(Domain::new(1.0, 1.0).unwrap(), nx, ny).unwrap()
}

fn field(seed: u64, nx: usize, ny: usize) -> GridFn {
    random_field(&mut ChaCha8Rng::seed_from_u64(seed), grid(nx, ny), 0.02)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelopes_match_the_naive_stencil(seed in any::<u64>(), nx in 2usize..20, ny in 2usize..20, r in 1usize..4) {
        let v = field(seed, nx, ny);
        let (lo, hi) = (lower_baire(&v, r).unwrap(), upper_baire(&v, r).unwrap());
        prop_assert_eq!(lo.values(), &brute_envelope(&v, r, true)[..]);
        prop_assert_eq!(hi.values(), &brute_envelope(&v, r, false)[..]);
    }

    #[test]
    fn envelopes_sandwich_and_are_monotone(seed in any::<u64>(), nx in 2usize..24, ny in 2usize..24, r in 1usize..4) {
        let v = field(seed, nx, ny);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let bumps: Vec<f64> = (0..v.values().len()).map(|_| rng.gen_range(0.0..0.5)).collect();
        let w = GridFn::new(
            v.grid().clone(),
            v.values()
                .iter()
                .zip(&bumps)
                .map(|(e, b)| match *e {
                    ExtReal::Finite(x) => ExtReal::Finite(x + b),
                    other => other,
                })
                .collect(),
        )
        .unwrap();
        prop_assert!(v.le(&w));
        let (lv, uv) = (lower_baire(&v, r).unwrap(), upper_baire(&v, r).unwrap());
        prop_assert!(lv.le(&v) && v.le(&uv));
        prop_assert!(lv.le(&lower_baire(&w, r).unwrap()));
        prop_assert!(uv.le(&upper_baire(&w, r).unwrap()));
        prop_assert!(nlsc_regularize(&v).le(&nlsc_regularize(&w)));
    }

    #[test]
    fn regularization_is_idempotent(seed in any::<u64>(), nx in 4usize..32, ny in 4usize..32) {
        let once = nlsc_regularize(&field(seed, nx, ny));
        let twice = nlsc_regularize(&once);
        let g = once.grid();
        for k in 0..g.node_count() {
            if g.edge_distance(k) >= INTERIOR_MARGIN {
                prop_assert_eq!(once.values()[k], twice.values()[k]);
            }
        }
        prop_assert!(is_normal_lsc(&once).is_normal);
    }

    #[test]
    fn single_spikes_vanish(c in -5.0f64..5.0, h in -50.0f64..50.0, i in 3usize..13, j in 3usize..13) {
        let g = grid(16, 16);
        let k = g.index(i, j);
        let mut values = vec![ExtReal::Finite(c); g.node_count()];
        values[k] = ExtReal::Finite(c + h);
        let r = nlsc_regularize(&GridFn::new(g, values).unwrap());
        prop_assert!(r.values().iter().all(|v| *v == ExtReal::Finite(c)));
    }

    #[test]
    fn interface_rule_matches_brute_force(
        seed in any::<u64>(),
        four in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = 1.0 / 64.0;
        let xs = rng.gen_range(-0.75..0.75);
        let ys = rng.gen_range(-0.75..0.75);
        let d = Domain::new(1.0, 1.0).unwrap();
        let y_edges = if four { vec![-1.0, ys, 1.0] } else { vec![-1.0, 1.0] };
        let tiling = Tiles::from_edges(d, 4.0, vec![-1.0, xs, 1.0], y_edges).unwrap();
        let consts: Vec<f64> = (0..tiling.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let pieces = tiling
            .tiles()
            .iter()
            .zip(&consts)
            .map(|(t, &c)| {
                let (x0, y0) = t.center();
                Piece::affine(x0, y0, c, 0.0, 0.0)
            })
            .collect();
        let u = TiledFn::new(tiling, pieces).unwrap();
        let off_gamma = |x: f64, y: f64| {
            let col = usize::from(x > xs);
            let row = if four { usize::from(y > ys) } else { 0 };
            consts[row * 2 + col]
        };
        let p = if four && rng.gen_bool(0.5) {
            (xs, ys)
        } else if four && rng.gen_bool(0.5) {
            (rng.gen_range(-0.9..0.9), ys)
        } else {
            (xs, rng.gen_range(-0.9..0.9))
        };
        prop_assume!((p.0 - xs).abs() < 1e-15 || (p.0 - xs).abs() > 8.0 * s);
        prop_assume!(!four || (p.1 - ys).abs() < 1e-15 || (p.1 - ys).abs() > 8.0 * s);
        let offset = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
        let brute = interface_brute(off_gamma, p, s, offset);
        prop_assert_eq!(u.evaluate(p.0, p.1).unwrap(), ExtReal::Finite(brute));
        let limits: Vec<f64> = support::owners(u.tiling(), p.0, p.1)
            .into_iter()
            .map(|i| consts[i])
            .collect();
        prop_assert_eq!(interface_value(&limits).unwrap(), brute);
    }
}

#[test]
fn steps_stay_two_valued() {
    let g = grid(32, 8);
    let v = GridFn::from_fn(g, |x, _| if x < 0.1 { 0.0 } else { 1.0 });
    let r = nlsc_regularize(&v);
    assert!(r
        .values()
        .iter()
        .all(|e| *e == ExtReal::Finite(0.0) || *e == ExtReal::Finite(1.0)));
    assert!(is_normal_lsc(&r).is_normal);
}

#[test]
fn infinities_propagate_through_envelopes() {
    let g = grid(8, 8);
    let mut values = vec![ExtReal::Finite(0.0); g.node_count()];
    values[g.index(4, 4)] = ExtReal::NegInf;
    let v = GridFn::new(g.clone(), values).unwrap();
    let lo = lower_baire(&v, 1).unwrap();
    assert_eq!(lo.get(3, 5), ExtReal::NegInf);
    assert_eq!(lo.get(2, 4), ExtReal::Finite(0.0));
    assert_eq!(upper_baire(&v, 1).unwrap().get(4, 4), ExtReal::Finite(0.0));
}
