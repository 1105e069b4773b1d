//! Arenas, partial polynomials, turn order, move application and adjudication.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::valued::{self, ord_int, RootReport, ValuedFieldConfig};
use crate::zring::{count_roots, CyclicRing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Nora,
    Wanda,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Nora => Player::Wanda,
            Player::Wanda => Player::Nora,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Nora => "nora",
            Player::Wanda => "wanda",
        })
    }
}

impl FromStr for Player {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nora" => Ok(Player::Nora),
            "wanda" => Ok(Player::Wanda),
            _ => Err(Error::Parse(format!("unknown player {s:?}"))),
        }
    }
}

/// A coefficient value: a canonical residue or an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coeff {
    Residue(u64),
    Rational(BigRational),
}

impl Coeff {
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Residue(v) => *v == 0,
            Coeff::Rational(q) => q.is_zero(),
        }
    }

    pub fn residue(&self) -> Option<u64> {
        match self {
            Coeff::Residue(v) => Some(*v),
            Coeff::Rational(_) => None,
        }
    }

    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Residue(_) => None,
            Coeff::Rational(q) => Some(q),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Residue(v) => write!(f, "{v}"),
            Coeff::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Coeff::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArenaKind {
    Cyclic(CyclicRing),
    Valued(ValuedFieldConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    pub kind: ArenaKind,
    pub degree: usize,
    pub allow_zero_leading: bool,
    /// Valued arenas only: every coefficient must have nonnegative order.
    pub integral: bool,
}

impl Arena {
    pub fn cyclic(modulus: u64, degree: usize) -> Result<Arena> {
        Self::build(ArenaKind::Cyclic(CyclicRing::new(modulus)?), degree)
    }

    pub fn valued(prime: u64, degree: usize) -> Result<Arena> {
        Self::build(ArenaKind::Valued(ValuedFieldConfig::qp(prime)?), degree)
    }

    pub fn with_config(config: ValuedFieldConfig, degree: usize) -> Result<Arena> {
        Self::build(ArenaKind::Valued(config), degree)
    }

    fn build(kind: ArenaKind, degree: usize) -> Result<Arena> {
        if degree == 0 {
            return Err(Error::domain("degree must be at least 1"));
        }
        Ok(Arena {
            kind,
            degree,
            allow_zero_leading: false,
            integral: false,
        })
    }

    pub fn allowing_zero_leading(mut self, allow: bool) -> Arena {
        self.allow_zero_leading = allow;
        self
    }

    pub fn integral(mut self, integral: bool) -> Arena {
        self.integral = integral;
        self
    }

    pub fn ring(&self) -> Option<&CyclicRing> {
        match &self.kind {
            ArenaKind::Cyclic(r) => Some(r),
            ArenaKind::Valued(_) => None,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        self.ring().map(|r| r.modulus())
    }

    pub fn prime(&self) -> Option<u64> {
        match &self.kind {
            ArenaKind::Valued(c) => Some(c.prime),
            ArenaKind::Cyclic(_) => None,
        }
    }

    pub fn is_extreme(&self, index: usize) -> bool {
        index == 0 || index == self.degree
    }

    pub fn zero_excluded(&self, index: usize) -> bool {
        self.is_extreme(index) && !self.allow_zero_leading
    }

    /// Parses a wire value: integers (reduced mod N) for cyclic arenas,
    /// `num/den` or integers for valued arenas.
    pub fn parse_value(&self, s: &str) -> Result<Coeff> {
        match &self.kind {
            ArenaKind::Cyclic(r) => {
                let v: BigInt = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad residue {s:?}")))?;
                let n = BigInt::from(r.modulus());
                let c = ((v % &n) + &n) % &n;
                Ok(Coeff::Residue(c.try_into().expect("residue fits in u64")))
            }
            ArenaKind::Valued(_) => parse_rational(s).map(Coeff::Rational),
        }
    }

    pub fn spec(&self) -> ArenaSpec {
        match &self.kind {
            ArenaKind::Cyclic(r) => ArenaSpec::Cyclic {
                modulus: r.modulus(),
            },
            ArenaKind::Valued(c) => ArenaSpec::Valued {
                prime: c.prime,
                ramification: c.ramification,
                integral: self.integral,
            },
        }
    }

    pub fn from_spec(spec: &ArenaSpec, degree: usize, allow_zero_leading: bool) -> Result<Arena> {
        let arena = match *spec {
            ArenaSpec::Cyclic { modulus } => Arena::cyclic(modulus, degree)?,
            ArenaSpec::Valued {
                prime,
                ramification,
                integral,
            } => Arena::with_config(ValuedFieldConfig::new(prime, ramification)?, degree)?
                .integral(integral),
        };
        Ok(arena.allowing_zero_leading(allow_zero_leading))
    }

    fn check_value(&self, index: usize, value: &Coeff) -> Result<()> {
        match (&self.kind, value) {
            (ArenaKind::Cyclic(r), Coeff::Residue(v)) => {
                if *v >= r.modulus() {
                    return Err(Error::illegal(format!(
                        "{v} is not reduced mod {}",
                        r.modulus()
                    )));
                }
            }
            (ArenaKind::Valued(c), Coeff::Rational(q)) => {
                if self.integral && ord_int(q, c.prime).is_some_and(|o| o < 0) {
                    return Err(Error::illegal(format!(
                        "{value} has negative order in an integral arena"
                    )));
                }
            }
            _ => return Err(Error::illegal("coefficient type does not match the arena")),
        }
        if value.is_zero() && self.zero_excluded(index) {
            return Err(Error::illegal(format!("a_{index} must be nonzero")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArenaSpec {
    Cyclic {
        modulus: u64,
    },
    Valued {
        prime: u64,
        #[serde(default = "default_ramification")]
        ramification: u8,
        #[serde(default)]
        integral: bool,
    },
}

fn default_ramification() -> u8 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialPolynomial {
    slots: Vec<Option<Coeff>>,
}

impl PartialPolynomial {
    pub fn empty(degree: usize) -> Self {
        PartialPolynomial {
            slots: vec![None; degree + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn slots(&self) -> &[Option<Coeff>] {
        &self.slots
    }

    pub fn get(&self, i: usize) -> Option<&Coeff> {
        self.slots.get(i).and_then(|s| s.as_ref())
    }

    pub fn set_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(|s| s.is_some())
    }

    pub fn open_indices(&self) -> Vec<usize> {
        (0..self.slots.len())
            .filter(|&i| self.slots[i].is_none())
            .collect()
    }

    pub fn residues(&self) -> Vec<Option<u64>> {
        self.slots
            .iter()
            .map(|s| s.as_ref().and_then(Coeff::residue))
            .collect()
    }

    pub fn rationals(&self) -> Vec<Option<BigRational>> {
        self.slots
            .iter()
            .map(|s| s.as_ref().and_then(|c| c.rational().cloned()))
            .collect()
    }

    /// Complete rational coefficient vector.
    pub fn rational_coeffs(&self) -> Result<Vec<BigRational>> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Some(Coeff::Rational(q)) => Ok(q.clone()),
                Some(Coeff::Residue(v)) => Ok(BigRational::from_integer(BigInt::from(*v))),
                None => Err(Error::IncompletePolynomial(i)),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub index: usize,
    pub value: Coeff,
}

impl Move {
    pub fn residue(index: usize, value: u64) -> Move {
        Move {
            index,
            value: Coeff::Residue(value),
        }
    }

    pub fn rational(index: usize, value: BigRational) -> Move {
        Move {
            index,
            value: Coeff::Rational(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub player: Player,
    pub index: usize,
    pub value: Coeff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenSlot {
    pub index: usize,
    pub zero_excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Roots { witnesses: Vec<u64> },
    NoRoots { modulus: u64 },
    Padic { prime: u64, report: RootReport },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub winner: Player,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    arena: Arc<Arena>,
    poly: PartialPolynomial,
    first: Player,
    log: Vec<LogEntry>,
}

impl GameState {
    pub fn new(arena: Arena, first: Player) -> GameState {
        Self::with_arena(Arc::new(arena), first)
    }

    pub fn with_arena(arena: Arc<Arena>, first: Player) -> GameState {
        let poly = PartialPolynomial::empty(arena.degree);
        GameState {
            arena,
            poly,
            first,
            log: Vec::new(),
        }
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn arena_handle(&self) -> &Arc<Arena> {
        &self.arena
    }

    pub fn degree(&self) -> usize {
        self.arena.degree
    }

    pub fn poly(&self) -> &PartialPolynomial {
        &self.poly
    }

    pub fn first(&self) -> Player {
        self.first
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn get(&self, i: usize) -> Option<&Coeff> {
        self.poly.get(i)
    }

    pub fn is_open(&self, i: usize) -> bool {
        i <= self.degree() && self.poly.get(i).is_none()
    }

    pub fn is_complete(&self) -> bool {
        self.poly.is_complete()
    }

    pub fn moves_made(&self) -> usize {
        self.log.len()
    }

    /// Player to move, `None` once every slot is set.
    pub fn to_move(&self) -> Option<Player> {
        if self.is_complete() {
            None
        } else if self.log.len() % 2 == 0 {
            Some(self.first)
        } else {
            Some(self.first.other())
        }
    }

    /// Entries of the log made by `player`, in order.
    pub fn moves_by(&self, player: Player) -> impl Iterator<Item = &LogEntry> {
        self.log.iter().filter(move |e| e.player == player)
    }

    pub fn legal_moves(&self) -> Result<Vec<OpenSlot>> {
        if self.is_complete() {
            return Err(Error::GameOver);
        }
        Ok(self
            .poly
            .open_indices()
            .into_iter()
            .map(|index| OpenSlot {
                index,
                zero_excluded: self.arena.zero_excluded(index),
            })
            .collect())
    }

    pub fn check_move(&self, mv: &Move) -> Result<()> {
        if self.is_complete() {
            return Err(Error::illegal("game is finished"));
        }
        if mv.index > self.degree() {
            return Err(Error::illegal(format!(
                "index {} exceeds degree {}",
                mv.index,
                self.degree()
            )));
        }
        if self.poly.get(mv.index).is_some() {
            return Err(Error::illegal(format!("a_{} is already set", mv.index)));
        }
        self.arena.check_value(mv.index, &mv.value)
    }

    pub fn apply_move(&self, mv: &Move) -> Result<GameState> {
        self.check_move(mv)?;
        let player = self.to_move().expect("checked above");
        let mut next = self.clone();
        next.poly.slots[mv.index] = Some(mv.value.clone());
        next.log.push(LogEntry {
            player,
            index: mv.index,
            value: mv.value.clone(),
        });
        Ok(next)
    }

    pub fn adjudicate(&self) -> Result<Outcome> {
        match self.arena.kind {
            ArenaKind::Cyclic(_) => self.adjudicate_cyclic(),
            ArenaKind::Valued(_) => self.adjudicate_valued(),
        }
    }

    pub fn adjudicate_cyclic(&self) -> Result<Outcome> {
        let ring = self
            .arena
            .ring()
            .ok_or_else(|| Error::domain("not a cyclic arena"))?;
        let rc = count_roots(ring, &self.poly.residues_checked()?)?;
        Ok(if rc.count > 0 {
            Outcome {
                winner: Player::Wanda,
                certificate: Certificate::Roots {
                    witnesses: rc.witnesses,
                },
            }
        } else {
            Outcome {
                winner: Player::Nora,
                certificate: Certificate::NoRoots {
                    modulus: ring.modulus(),
                },
            }
        })
    }

    /// Adjudicates over Q_p with the root oracle.
    pub fn adjudicate_valued(&self) -> Result<Outcome> {
        let prime = self
            .arena
            .prime()
            .ok_or_else(|| Error::domain("not a valued arena"))?;
        let coeffs = self.poly.rational_coeffs()?;
        let report = valued::qp_root_exists(&coeffs, prime)?;
        let winner = if report.exists {
            Player::Wanda
        } else {
            Player::Nora
        };
        Ok(Outcome {
            winner,
            certificate: Certificate::Padic { prime, report },
        })
    }

    pub fn to_record(&self) -> GameRecord {
        GameRecord {
            arena: self.arena.spec(),
            degree: self.degree(),
            allow_zero_leading: self.arena.allow_zero_leading,
            first: self.first,
            slots: self
                .poly
                .slots
                .iter()
                .map(|s| {
                    s.as_ref()
                        .map_or_else(|| "unset".to_string(), |c| c.to_string())
                })
                .collect(),
            log: self
                .log
                .iter()
                .map(|e| LogRecord {
                    player: e.player,
                    index: e.index,
                    value: e.value.to_string(),
                })
                .collect(),
        }
    }

    /// Rebuilds a state by replaying the log; the slot list must agree.
    pub fn from_record(rec: &GameRecord) -> Result<GameState> {
        let arena = Arena::from_spec(&rec.arena, rec.degree, rec.allow_zero_leading)?;
        let mut state = GameState::new(arena, rec.first);
        for e in &rec.log {
            if state.to_move() != Some(e.player) {
                return Err(Error::illegal(format!(
                    "log entry out of turn: {}",
                    e.player
                )));
            }
            let value = state.arena.parse_value(&e.value)?;
            state = state.apply_move(&Move {
                index: e.index,
                value,
            })?;
        }
        if state.to_record().slots != rec.slots {
            return Err(Error::Parse("slots disagree with the replayed log".into()));
        }
        Ok(state)
    }
}

impl PartialPolynomial {
    fn residues_checked(&self) -> Result<Vec<Option<u64>>> {
        for (i, s) in self.slots.iter().enumerate() {
            if s.is_none() {
                return Err(Error::IncompletePolynomial(i));
            }
        }
        Ok(self.residues())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub player: Player,
    pub index: usize,
    pub value: String,
}

/// Wire form of a game: arena, degree, slots as strings (`"unset"` when
/// open), and the move log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub arena: ArenaSpec,
    pub degree: usize,
    #[serde(default)]
    pub allow_zero_leading: bool,
    pub first: Player,
    pub slots: Vec<String>,
    pub log: Vec<LogRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valued::{rat, ratio};
    use Player::*;

    fn play(state: &GameState, moves: &[(usize, u64)]) -> GameState {
        moves.iter().fold(state.clone(), |s, &(i, v)| {
            s.apply_move(&Move::residue(i, v)).unwrap()
        })
    }

    #[test]
    fn legal_move_listing() {
        let g = GameState::new(Arena::cyclic(16, 3).unwrap(), Wanda);
        let lm = g.legal_moves().unwrap();
        assert_eq!(
            lm.iter().map(|s| s.index).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            lm.iter()
                .filter(|s| s.zero_excluded)
                .map(|s| s.index)
                .collect::<Vec<_>>(),
            vec![0, 3]
        );
        let g = play(&g, &[(0, 12)]);
        assert_eq!(g.get(0), Some(&Coeff::Residue(12)));
        let lm = g.legal_moves().unwrap();
        assert_eq!(
            lm.iter()
                .map(|s| (s.index, s.zero_excluded))
                .collect::<Vec<_>>(),
            vec![(1, false), (2, false), (3, true)]
        );

        let lin = play(
            &GameState::new(Arena::cyclic(4, 1).unwrap(), Nora),
            &[(0, 1), (1, 1)],
        );
        assert_eq!(lin.legal_moves(), Err(Error::GameOver));
    }

    #[test]
    fn move_rules() {
        let g = GameState::new(Arena::cyclic(9, 2).unwrap(), Wanda);
        let g = g.apply_move(&Move::residue(1, 0)).unwrap();
        assert_eq!(g.to_move(), Some(Nora));
        assert!(matches!(
            g.apply_move(&Move::residue(1, 3)),
            Err(Error::IllegalMove(_))
        ));
        let g3 = GameState::new(Arena::cyclic(16, 3).unwrap(), Nora);
        assert!(matches!(
            g3.apply_move(&Move::residue(0, 0)),
            Err(Error::IllegalMove(_))
        ));
        assert!(matches!(
            g3.apply_move(&Move::residue(1, 16)),
            Err(Error::IllegalMove(_))
        ));
        let flag = GameState::new(
            Arena::cyclic(16, 3).unwrap().allowing_zero_leading(true),
            Nora,
        );
        assert!(flag.apply_move(&Move::residue(3, 0)).is_ok());
        assert!(g3.apply_move(&Move::rational(1, rat(1))).is_err());
    }

    #[test]
    fn integral_arena_rejects_negative_order() {
        let g = GameState::new(Arena::valued(5, 3).unwrap().integral(true), Wanda);
        assert!(g.apply_move(&Move::rational(1, ratio(1, 5))).is_err());
        assert!(g.apply_move(&Move::rational(1, ratio(5, 3))).is_ok());
    }

    #[test]
    fn cyclic_adjudication() {
        let g = play(
            &GameState::new(Arena::cyclic(4, 1).unwrap(), Nora),
            &[(0, 1), (1, 1)],
        );
        let o = g.adjudicate().unwrap();
        assert_eq!(o.winner, Wanda);
        assert_eq!(o.certificate, Certificate::Roots { witnesses: vec![3] });
        let g = play(
            &GameState::new(Arena::cyclic(4, 1).unwrap(), Nora),
            &[(0, 1), (1, 2)],
        );
        assert_eq!(g.adjudicate().unwrap().winner, Nora);
        let g = play(
            &GameState::new(Arena::cyclic(27, 3).unwrap(), Wanda),
            &[(0, 18), (1, 3), (2, 0), (3, 1)],
        );
        match g.adjudicate().unwrap().certificate {
            Certificate::Roots { witnesses } => assert!(witnesses.contains(&3)),
            c => panic!("unexpected {c:?}"),
        }
        let open = GameState::new(Arena::cyclic(4, 1).unwrap(), Nora);
        assert_eq!(open.adjudicate(), Err(Error::IncompletePolynomial(0)));
    }

    #[test]
    fn valued_adjudication() {
        let mk = |p, cs: &[BigRational]| {
            let mut g = GameState::new(Arena::valued(p, cs.len() - 1).unwrap(), Nora);
            for (i, c) in cs.iter().enumerate() {
                g = g.apply_move(&Move::rational(i, c.clone())).unwrap();
            }
            g.adjudicate().unwrap().winner
        };
        assert_eq!(mk(7, &[rat(-2), rat(0), rat(1)]), Wanda);
        assert_eq!(mk(5, &[rat(5), rat(0), rat(3)]), Nora);
        assert_eq!(mk(5, &[rat(125), rat(25), rat(0), rat(1)]), Nora);
    }

    #[test]
    fn record_round_trip() {
        let g = play(
            &GameState::new(Arena::cyclic(16, 3).unwrap(), Wanda),
            &[(0, 12), (1, 4)],
        );
        let rec = g.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            r#"{"arena":{"kind":"cyclic","modulus":16},"degree":3,"allow_zero_leading":false,"first":"wanda","slots":["12","4","unset","unset"],"log":[{"player":"wanda","index":0,"value":"12"},{"player":"nora","index":1,"value":"4"}]}"#
        );
        let back: GameRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(GameState::from_record(&back).unwrap(), g);

        let v = GameState::new(Arena::valued(5, 2).unwrap(), Nora)
            .apply_move(&Move::rational(0, ratio(-3, 25)))
            .unwrap();
        let rec = v.to_record();
        assert_eq!(rec.slots, vec!["-3/25", "unset", "unset"]);
        assert_eq!(GameState::from_record(&rec).unwrap(), v);
    }

    #[test]
    fn residues_parse_canonically() {
        let a = Arena::cyclic(16, 3).unwrap();
        assert_eq!(a.parse_value("-4").unwrap(), Coeff::Residue(12));
        assert_eq!(a.parse_value("35").unwrap(), Coeff::Residue(3));
        assert!(a.parse_value("1/2").is_err());
    }

    #[test]
    fn first_player_moves_ceiling_half() {
        for d in 1..=6usize {
            let mut g = GameState::new(Arena::cyclic(10, d).unwrap(), Nora);
            for i in 0..=d {
                g = g.apply_move(&Move::residue(i, 1)).unwrap();
            }
            assert_eq!(g.moves_by(Nora).count(), (d + 2) / 2);
        }
    }
}
