use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use polygame_core::strategy::{
    NoraCubic, NoraHighdeg, NoraQuad, NoraQuartic, Strategy as GameStrategy,
};
use polygame_core::valued::poly::reverse;
use polygame_core::valued::{newton_polygon_of, ord_int, p_pow, qp_root_exists, root_orders};
use polygame_core::verify::brute_force_hull;
use polygame_core::{Arena, GameState, Move, Player};
use proptest::prelude::*;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn q(num: i64, den: i64, p: u64, o: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den)) * p_pow(p, o)
}

/// `(numerator, denominator, order)`; numerator 0 means a zero coefficient.
fn coeff() -> impl Strategy<Value = (i64, i64, i64)> {
    (-30i64..=30, 1i64..=30, -4i64..=4)
}

fn poly(p: u64, raw: &[(i64, i64, i64)]) -> Vec<BigRational> {
    raw.iter().map(|&(n, d, o)| q(n, d, p, o)).collect()
}

fn play(
    strategy: &dyn GameStrategy,
    arena: Arena,
    first: Player,
    script: &[(usize, (i64, i64, i64))],
) -> GameState {
    let p = arena.prime().unwrap();
    let mut state = GameState::new(arena, first);
    let mut script = script.iter().cycle();
    while !state.is_complete() {
        let mv = if state.to_move() == Some(strategy.player()) {
            strategy.decide(&state).unwrap().mv
        } else {
            let slots = state.legal_moves().unwrap();
            let &(pick, (n, d, o)) = script.next().unwrap();
            let slot = &slots[pick % slots.len()];
            let n = if n == 0 && slot.zero_excluded { 1 } else { n };
            Move::rational(slot.index, q(n, d, p, o))
        };
        state = state.apply_move(&mv).unwrap();
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn polygon_is_convex_and_matches_brute_hull(
        pi in 0usize..4,
        raw in proptest::collection::vec(coeff(), 2..8),
    ) {
        let p = PRIMES[pi];
        let mut f = poly(p, &raw);
        let d = f.len() - 1;
        for i in [0, d] {
            if f[i].is_zero() {
                f[i] = q(1, 1, p, 0);
            }
        }
        let np = newton_polygon_of(&f, p).unwrap();
        prop_assert!(np.segments.windows(2).all(|w| w[0].slope < w[1].slope));
        prop_assert_eq!(np.segments.iter().map(|s| s.length).sum::<usize>(), d);
        prop_assert_eq!(root_orders(&np).iter().map(|&(_, m)| m).sum::<usize>(), d);
        let points: Vec<_> = f
            .iter()
            .enumerate()
            .filter_map(|(i, c)| ord_int(c, p).map(|o| (i, Ratio::from_integer(o))))
            .collect();
        let brute: Vec<_> = brute_force_hull(&points)
            .into_iter()
            .map(|(i, v)| (i, polygame_core::valued::Valuation::Finite(v)))
            .collect();
        prop_assert_eq!(np.vertices, brute);
    }

    #[test]
    fn roots_survive_reversal(pi in 0usize..4, raw in proptest::collection::vec(coeff(), 2..6)) {
        let p = PRIMES[pi];
        let mut f = poly(p, &raw);
        let d = f.len() - 1;
        for i in [0, d] {
            if f[i].is_zero() {
                f[i] = q(-1, 1, p, 1);
            }
        }
        // x -> 1/x maps nonzero roots to nonzero roots
        let a = qp_root_exists(&f, p).unwrap().exists;
        let b = qp_root_exists(&reverse(&f), p).unwrap().exists;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn linear_factors_always_have_roots(pi in 0usize..4, r in coeff(), raw in proptest::collection::vec(coeff(), 1..5)) {
        let p = PRIMES[pi];
        let (n, d, o) = r;
        let root = q(n, d, p, o);
        let mut g = poly(p, &raw);
        let last = g.len() - 1;
        if g[last].is_zero() {
            g[last] = q(1, 1, p, 0);
        }
        let mut f = vec![BigRational::zero(); g.len() + 1];
        for (i, c) in g.iter().enumerate() {
            f[i + 1] += c;
            f[i] -= c * &root;
        }
        prop_assert!(qp_root_exists(&f, p).unwrap().exists);
    }

    #[test]
    fn valued_strategies_beat_arbitrary_adversaries(
        pi in 0usize..4,
        which in 0usize..4,
        script in proptest::collection::vec((0usize..8, coeff()), 1..8),
    ) {
        let p = PRIMES[pi];
        let (s, d, first): (&dyn GameStrategy, usize, Player) = match which {
            0 => (&NoraQuad, 2, Player::Nora),
            1 => (&NoraQuartic, 4, Player::Nora),
            2 => (&NoraHighdeg, 5, Player::Wanda),
            _ => (&NoraCubic, 3, Player::Wanda),
        };
        let state = play(s, Arena::valued(p, d).unwrap(), first, &script);
        let outcome = state.adjudicate().unwrap();
        prop_assert_eq!(outcome.winner, Player::Nora, "{:?}", state.to_record());

        let record = state.to_record();
        let replayed = GameState::from_record(&record).unwrap();
        prop_assert_eq!(replayed.to_record(), record);
    }
}
