//! Raw outputs of the abelian constructions, collected for independent
//! re-checking: primes for a range of degree bounds, avoidance sequences
//! over a parameter box, and finished cubic games.

use serde::{Deserialize, Serialize};

use crate::abelian::{
    abelian_certificate, ap_avoid, find_abelian_prime, AbelianCertificate, AbelianPrime,
    HalfLatticeAvoidance, NoraAbelianCubic,
};
use crate::error::Result;
use crate::game::{Arena, GameState, Player};

use super::random_games;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianSuiteConfig {
    pub degrees: (usize, usize),
    pub prime_search_limit: u64,
    /// `n1, n2` range over `[-offset_bound, offset_bound]`.
    pub offset_bound: i64,
    pub avoid_count: usize,
    pub cubic_primes: Vec<u64>,
    pub cubic_seed: u64,
    pub cubic_games: u64,
    pub bound: i64,
}

impl Default for AbelianSuiteConfig {
    fn default() -> Self {
        AbelianSuiteConfig {
            degrees: (9, 20),
            prime_search_limit: 1_000_000,
            offset_bound: 5,
            avoid_count: 5,
            cubic_primes: vec![2, 3, 5, 7],
            cubic_seed: 1,
            cubic_games: 100,
            bound: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicGame {
    pub prime: u64,
    pub complete: bool,
    /// `a_0..a_3` as rationals, unset slots as `"unset"`.
    pub coeffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<AbelianCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianSuiteReport {
    pub primes: Vec<AbelianPrime>,
    pub avoidance: Vec<HalfLatticeAvoidance>,
    pub cubic_games: Vec<CubicGame>,
}

fn cubic_game(state: &GameState, p: u64) -> Result<CubicGame> {
    let coeffs = state.poly().rationals();
    let shown = coeffs
        .iter()
        .map(|c| c.as_ref().map_or("unset".into(), |q| q.to_string()))
        .collect();
    let certificate = if state.is_complete() {
        let f: Vec<_> = coeffs.into_iter().map(Option::unwrap_or_default).collect();
        Some(abelian_certificate(&f, p)?)
    } else {
        None
    };
    Ok(CubicGame {
        prime: p,
        complete: state.is_complete(),
        coeffs: shown,
        certificate,
    })
}

pub fn abelian_suite(config: &AbelianSuiteConfig) -> Result<AbelianSuiteReport> {
    let (lo, hi) = config.degrees;
    let primes = (lo..=hi)
        .map(|d| find_abelian_prime(d, config.prime_search_limit))
        .collect::<Result<_>>()?;

    let b = config.offset_bound;
    let mut avoidance = Vec::new();
    for d in 9..=15 {
        for i in 3..=d - 3 {
            for n1 in -b..=b {
                for n2 in -b..=b {
                    avoidance.push(ap_avoid(n1, n2, d, i, config.avoid_count)?);
                }
            }
        }
    }

    let mut cubic_games = Vec::new();
    for &p in &config.cubic_primes {
        let arena = Arena::valued(p, 3)?;
        let games = random_games(
            &NoraAbelianCubic,
            &arena,
            Player::Wanda,
            config.cubic_seed,
            config.cubic_games,
            config.bound,
        )?;
        for g in &games {
            cubic_games.push(cubic_game(g, p)?);
        }
    }
    Ok(AbelianSuiteReport {
        primes,
        avoidance,
        cubic_games,
    })
}
