use super::Bucket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strength {
    /// Members of the lesser bucket are nondescendants of the other's.
    Ordinary,
    /// Members of the greater bucket descend from the focal variable.
    FocalDescendant,
}

/// Relation between two buckets `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `a < b`
    Precedes(Strength),
    /// `b < a`
    Follows(Strength),
    /// No directed path between any members.
    Ndp,
    /// Conflicting evidence.
    Unknown,
}

impl Relation {
    /// The same relation seen from `b`.
    pub fn flip(self) -> Self {
        match self {
            Relation::Precedes(s) => Relation::Follows(s),
            Relation::Follows(s) => Relation::Precedes(s),
            other => other,
        }
    }

    pub fn is_less(self) -> bool {
        matches!(self, Relation::Precedes(_))
    }
}

/// Compares tags bitwise.
///
/// 1. `a <= b` with a strict bit: `a < b`, unless `b` is focal for some
///    transition `l` with `a_l = 1`.
/// 2. The mirror case.
/// 3. Strict bits in both directions: NDP, unless either bucket is focal
///    for a transition in which the other changed.
/// 4. Equal tags: the focal bucket precedes the other with focal-descendant
///    strength; two focal buckets (or two ordinary ones) are unknown.
pub fn extract_relation(a: &Bucket, b: &Bucket) -> Relation {
    debug_assert_eq!(a.tag.len(), b.tag.len());
    let some_less = a.tag.iter().zip(&b.tag).any(|(&x, &y)| !x && y);
    let some_greater = a.tag.iter().zip(&b.tag).any(|(&x, &y)| x && !y);
    // b focal for a transition in which a changed, and vice versa
    let b_guard = b.focal_for.iter().any(|&l| a.tag[l]);
    let a_guard = a.focal_for.iter().any(|&l| b.tag[l]);
    match (some_less, some_greater) {
        (true, false) if b_guard => Relation::Unknown,
        (true, false) => Relation::Precedes(Strength::Ordinary),
        (false, true) if a_guard => Relation::Unknown,
        (false, true) => Relation::Follows(Strength::Ordinary),
        (true, true) if a_guard || b_guard => Relation::Unknown,
        (true, true) => Relation::Ndp,
        (false, false) => match (a.is_focal(), b.is_focal()) {
            (true, false) => Relation::Precedes(Strength::FocalDescendant),
            (false, true) => Relation::Follows(Strength::FocalDescendant),
            _ => Relation::Unknown,
        },
    }
}
