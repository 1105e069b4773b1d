use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::Player;
use crate::zring::{classify, is_cube_free, last_player, CyclicRing};

use super::{
    CrtLift, NoraCubefree, NoraCubic, NoraEven, NoraHighdeg, NoraMultiPrime, NoraQuad, NoraQuartic,
    NoraSixteen, StrategyRef, WandaFourthPower, WandaIntegral, WandaLast, WandaPrimePower,
};

/// Winning strategy for `role` over Z/NZ, or `RoleLoses(winner)` when the
/// other player wins with correct play.
pub fn select_strategy(n: u64, d: usize, role: Player, first: Player) -> Result<StrategyRef> {
    let winner = classify(n, d, first)?;
    if winner != role {
        return Err(Error::RoleLoses(winner));
    }
    if role == Player::Nora {
        return Ok(if d % 2 == 0 {
            Arc::new(NoraEven)
        } else if is_cube_free(n)? {
            Arc::new(NoraCubefree)
        } else {
            Arc::new(NoraSixteen)
        });
    }
    if d == 1 || last_player(d, first) == Player::Wanda {
        return Ok(Arc::new(WandaLast));
    }
    let ring = CyclicRing::new(n)?;
    let f = ring.factorization();
    let pick = f
        .iter()
        .find(|&&(_, m)| m >= 3 && m != 4)
        .map(|&(p, m)| (p.pow(m), Arc::new(WandaPrimePower) as StrategyRef))
        .or_else(|| {
            f.iter()
                .find(|&&(p, m)| m == 4 && (p != 2 || d == 3))
                .map(|&(p, m)| (p.pow(m), Arc::new(WandaFourthPower) as StrategyRef))
        });
    let (q, inner) =
        pick.ok_or_else(|| Error::not_applicable(format!("no Wanda construction for N = {n}")))?;
    Ok(if q == n {
        inner
    } else {
        Arc::new(CrtLift::new(inner, q))
    })
}

/// Strategy for `role` over Q_p, when one of the valued constructions
/// covers the degree and turn order.
pub fn select_valued_strategy(
    d: usize,
    role: Player,
    first: Player,
    integral: bool,
) -> Result<StrategyRef> {
    let last = last_player(d, first);
    let none =
        || Error::not_applicable(format!("no {role} strategy for d = {d} with {first} first"));
    match role {
        Player::Wanda if last == Player::Wanda || d == 1 => Ok(Arc::new(WandaLast)),
        Player::Wanda if integral && d == 3 => Ok(Arc::new(WandaIntegral)),
        Player::Wanda => Err(none()),
        Player::Nora if last == Player::Wanda || d == 1 => Err(Error::RoleLoses(Player::Wanda)),
        Player::Nora if d == 2 => Ok(Arc::new(NoraQuad)),
        Player::Nora if integral => Err(none()),
        Player::Nora => Ok(match d {
            3 => Arc::new(NoraCubic),
            4 => Arc::new(NoraQuartic),
            _ => Arc::new(NoraHighdeg),
        }),
    }
}

/// Looks up a strategy by its id, e.g. `nora_even`,
/// `crt_lift[8](wanda_prime_power)` or `nora_multi_prime[2,3]`.
pub fn strategy_by_name(name: &str) -> Result<StrategyRef> {
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("crt_lift[") {
        let (q, inner) = rest
            .split_once("](")
            .and_then(|(q, r)| Some((q, r.strip_suffix(')')?)))
            .ok_or_else(|| Error::Parse(format!("bad strategy name {name:?}")))?;
        let q = q
            .parse()
            .map_err(|_| Error::Parse(format!("bad component in {name:?}")))?;
        return Ok(Arc::new(CrtLift::new(strategy_by_name(inner)?, q)));
    }
    if let Some(rest) = name
        .strip_prefix("nora_multi_prime[")
        .and_then(|r| r.strip_suffix(']'))
    {
        let primes = rest
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad prime in {name:?}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        return Ok(Arc::new(NoraMultiPrime::new(primes)?));
    }
    Ok(match name {
        "wanda_last" => Arc::new(WandaLast),
        "nora_even" => Arc::new(NoraEven),
        "nora_cubefree" => Arc::new(NoraCubefree),
        "nora_sixteen" => Arc::new(NoraSixteen),
        "wanda_prime_power" => Arc::new(WandaPrimePower),
        "wanda_fourth_power" => Arc::new(WandaFourthPower),
        "nora_quad" => Arc::new(NoraQuad),
        "nora_quartic" => Arc::new(NoraQuartic),
        "nora_highdeg" => Arc::new(NoraHighdeg),
        "nora_cubic" => Arc::new(NoraCubic),
        "wanda_integral" => Arc::new(WandaIntegral),
        "nora_abelian_cubic" => Arc::new(crate::abelian::NoraAbelianCubic),
        _ => return Err(Error::Parse(format!("unknown strategy {name:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Player::*;

    fn id(n: u64, d: usize, role: Player, first: Player) -> String {
        select_strategy(n, d, role, first).unwrap().id()
    }

    #[test]
    fn dispatch() {
        assert_eq!(id(12, 2, Nora, Nora), "nora_even");
        assert_eq!(id(12, 3, Nora, Wanda), "nora_cubefree");
        assert_eq!(id(48, 5, Nora, Wanda), "nora_sixteen");
        assert_eq!(id(9, 3, Wanda, Nora), "wanda_last");
        assert_eq!(id(6, 1, Wanda, Nora), "wanda_last");
        assert_eq!(id(27, 3, Wanda, Wanda), "wanda_prime_power");
        assert_eq!(id(16, 3, Wanda, Wanda), "wanda_fourth_power");
        assert_eq!(id(72, 3, Wanda, Wanda), "crt_lift[8](wanda_prime_power)");
        assert_eq!(id(48, 3, Wanda, Wanda), "crt_lift[16](wanda_fourth_power)");
        assert!(matches!(
            select_strategy(12, 2, Wanda, Nora),
            Err(Error::RoleLoses(Nora))
        ));
    }

    #[test]
    fn valued_dispatch() {
        let id = |d, role, first, integral| {
            select_valued_strategy(d, role, first, integral).map(|s| s.id())
        };
        assert_eq!(id(2, Nora, Nora, false).unwrap(), "nora_quad");
        assert_eq!(id(3, Nora, Wanda, false).unwrap(), "nora_cubic");
        assert_eq!(id(4, Nora, Nora, false).unwrap(), "nora_quartic");
        assert_eq!(id(7, Nora, Wanda, false).unwrap(), "nora_highdeg");
        assert_eq!(id(3, Wanda, Wanda, true).unwrap(), "wanda_integral");
        assert_eq!(id(4, Wanda, Wanda, false).unwrap(), "wanda_last");
        assert!(matches!(
            id(3, Nora, Nora, false),
            Err(Error::RoleLoses(Wanda))
        ));
        assert!(id(3, Nora, Wanda, true).is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in [
            "nora_even",
            "crt_lift[16](wanda_fourth_power)",
            "nora_multi_prime[2,3]",
            "nora_cubic",
        ] {
            assert_eq!(strategy_by_name(name).unwrap().id(), name);
        }
        assert!(strategy_by_name("crt_lift[8](nope)").is_err());
    }
}
