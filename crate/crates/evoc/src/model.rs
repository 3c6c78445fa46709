//! Core domain vocabulary: body parts, positions, actions and action chains.
//!
//! Everything in this module is a small immutable value type; the rest of the
//! crate builds on these.

use serde::{Deserialize, Serialize};
use std::fmt;

/// The six body parts an agent can move, in canonical order.
///
/// The canonical order (`ALL`) is also the order used by [`Action`] indexing
/// and by the text encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BodyPart {
    LeftArm,
    RightArm,
    LeftLeg,
    RightLeg,
    Head,
    Hips,
}

impl BodyPart {
    pub const ALL: [BodyPart; 6] = [
        BodyPart::LeftArm,
        BodyPart::RightArm,
        BodyPart::LeftLeg,
        BodyPart::RightLeg,
        BodyPart::Head,
        BodyPart::Hips,
    ];

    /// Index into the canonical order.
    pub fn index(self) -> usize {
        match self {
            BodyPart::LeftArm => 0,
            BodyPart::RightArm => 1,
            BodyPart::LeftLeg => 2,
            BodyPart::RightLeg => 3,
            BodyPart::Head => 4,
            BodyPart::Hips => 5,
        }
    }

    /// The symmetric partner of a limb; `None` for head and hips.
    pub fn counterpart(self) -> Option<BodyPart> {
        match self {
            BodyPart::LeftArm => Some(BodyPart::RightArm),
            BodyPart::RightArm => Some(BodyPart::LeftArm),
            BodyPart::LeftLeg => Some(BodyPart::RightLeg),
            BodyPart::RightLeg => Some(BodyPart::LeftLeg),
            BodyPart::Head | BodyPart::Hips => None,
        }
    }
}

/// Placement of a single body part. `Neutral` is the rest position; the other
/// two are the "active" positions (up / down).
///
/// `Ord` follows the declaration order `Down < Neutral < Up`, which fixes the
/// enumeration order of the action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    Down,
    Neutral,
    Up,
}

impl Position {
    pub const ALL: [Position; 3] = [Position::Down, Position::Neutral, Position::Up];

    pub fn is_active(self) -> bool {
        self != Position::Neutral
    }

    /// Numeric embedding: Down = -1, Neutral = 0, Up = +1.
    pub fn offset(self) -> i8 {
        match self {
            Position::Down => -1,
            Position::Neutral => 0,
            Position::Up => 1,
        }
    }

    /// The opposite active position; Neutral maps to itself.
    pub fn flipped(self) -> Position {
        match self {
            Position::Down => Position::Up,
            Position::Neutral => Position::Neutral,
            Position::Up => Position::Down,
        }
    }

    fn encode(self) -> char {
        match self {
            Position::Down => 'D',
            Position::Neutral => 'N',
            Position::Up => 'U',
        }
    }

    fn decode(c: char) -> Result<Position, DecodeError> {
        match c {
            'D' => Ok(Position::Down),
            'N' => Ok(Position::Neutral),
            'U' => Ok(Position::Up),
            _ => Err(DecodeError::BadSymbol(c)),
        }
    }
}

/// Number of distinct actions (3 positions ^ 6 parts).
pub const ACTION_SPACE: usize = 729;

/// One pattern of placements for all six body parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    positions: [Position; 6],
}

impl Action {
    pub fn new(positions: [Position; 6]) -> Self {
        Action { positions }
    }

    /// The all-neutral (immobile) action.
    pub fn neutral() -> Self {
        Action {
            positions: [Position::Neutral; 6],
        }
    }

    pub fn position(self, part: BodyPart) -> Position {
        self.positions[part.index()]
    }

    pub fn with_position(mut self, part: BodyPart, pos: Position) -> Self {
        self.positions[part.index()] = pos;
        self
    }

    pub fn positions(self) -> [Position; 6] {
        self.positions
    }

    /// Number of parts not in the neutral position.
    pub fn active_count(self) -> usize {
        self.positions.iter().filter(|p| p.is_active()).count()
    }

    /// Dense index in `0..ACTION_SPACE`, consistent with [`enumerate_actions`].
    pub fn index(self) -> usize {
        self.positions
            .iter()
            .fold(0, |acc, p| acc * 3 + (p.offset() + 1) as usize)
    }

    /// Canonical text form: six characters from {D,N,U} in body-part order,
    /// e.g. `"UUNNND"`.
    pub fn encode(self) -> String {
        self.positions.iter().map(|p| p.encode()).collect()
    }

    pub fn decode(s: &str) -> Result<Action, DecodeError> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 6 {
            return Err(DecodeError::BadLength(chars.len()));
        }
        let mut positions = [Position::Neutral; 6];
        for (i, c) in chars.into_iter().enumerate() {
            positions[i] = Position::decode(c)?;
        }
        Ok(Action { positions })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// All 729 actions exactly once, lexicographic over the six positions with
/// `Down < Neutral < Up`; the first yielded action is all-Down.
pub fn enumerate_actions() -> impl Iterator<Item = Action> {
    (0..ACTION_SPACE).map(|mut idx| {
        let mut positions = [Position::Neutral; 6];
        for slot in positions.iter_mut().rev() {
            *slot = Position::ALL[idx % 3];
            idx /= 3;
        }
        Action { positions }
    })
}

/// An implemented multi-step action: a non-empty sequence of sub-actions.
///
/// With chaining disabled every chain has exactly one step. The extension
/// rule (see the agent module) never appends a step equal to the current
/// final step, though in-place modification of the final step may leave it
/// equal to its predecessor; extension is then blocked until it differs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    steps: Vec<Action>,
}

impl Chain {
    /// A single-step chain.
    pub fn single(action: Action) -> Self {
        Chain {
            steps: vec![action],
        }
    }

    pub fn from_steps(steps: Vec<Action>) -> Result<Self, EmptyChain> {
        if steps.is_empty() {
            return Err(EmptyChain);
        }
        Ok(Chain { steps })
    }

    pub fn steps(&self) -> &[Action] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn last(&self) -> Action {
        *self.steps.last().expect("chain is non-empty")
    }

    /// Step before the final one, if any.
    pub fn penultimate(&self) -> Option<Action> {
        (self.steps.len() >= 2).then(|| self.steps[self.steps.len() - 2])
    }

    /// Copy with the final step replaced.
    pub fn with_last_replaced(&self, action: Action) -> Chain {
        let mut steps = self.steps.clone();
        *steps.last_mut().expect("chain is non-empty") = action;
        Chain { steps }
    }

    /// Copy with one step appended.
    pub fn extended(&self, action: Action) -> Chain {
        let mut steps = self.steps.clone();
        steps.push(action);
        Chain { steps }
    }

    /// Canonical text form: step encodings joined by `|`.
    pub fn encode(&self) -> String {
        self.steps
            .iter()
            .map(|a| a.encode())
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Non-negative action/chain score.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Fitness(f64);

impl Fitness {
    pub fn new(value: f64) -> Self {
        debug_assert!(value >= 0.0, "fitness must be non-negative, got {value}");
        Fitness(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("a chain must contain at least one step")]
pub struct EmptyChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("action encoding must be 6 characters, got {0}")]
    BadLength(usize),
    #[error("invalid position symbol {0:?}, expected one of D/N/U")]
    BadSymbol(char),
}
