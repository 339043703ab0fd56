//! Italian consonant inventory and gemination behaviour, used to check
//! annotation labels.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occurrence {
    /// Single and geminated forms both occur intervocalically.
    SingleAndGeminate,
    /// Always geminated intervocalically.
    OnlyGeminate,
    /// Never geminated.
    NeverGeminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manner {
    Stop,
    Nasal,
    Liquid,
    Fricative,
    Affricate,
}

#[derive(Debug, Clone, Copy)]
pub struct Consonant {
    pub grapheme: &'static str,
    pub example: &'static str,
    pub ipa: &'static str,
    pub manner: Manner,
    pub occurrence: Occurrence,
}

use Manner::*;
use Occurrence::*;

pub const CONSONANTS: &[Consonant] = &[
    Consonant { grapheme: "n", example: "nonna", ipa: "n", manner: Nasal, occurrence: SingleAndGeminate },
    Consonant { grapheme: "r", example: "ragazzi", ipa: "r", manner: Liquid, occurrence: SingleAndGeminate },
    Consonant { grapheme: "t", example: "teoria", ipa: "t", manner: Stop, occurrence: SingleAndGeminate },
    Consonant { grapheme: "d", example: "digitale", ipa: "d", manner: Stop, occurrence: SingleAndGeminate },
    Consonant { grapheme: "l", example: "lavoro", ipa: "l", manner: Liquid, occurrence: SingleAndGeminate },
    Consonant { grapheme: "s", example: "sorelle", ipa: "s", manner: Fricative, occurrence: SingleAndGeminate },
    Consonant { grapheme: "c", example: "cugino", ipa: "k", manner: Stop, occurrence: SingleAndGeminate },
    Consonant { grapheme: "p", example: "parole", ipa: "p", manner: Stop, occurrence: SingleAndGeminate },
    Consonant { grapheme: "m", example: "mattino", ipa: "m", manner: Nasal, occurrence: SingleAndGeminate },
    Consonant { grapheme: "v", example: "vacanza", ipa: "v", manner: Fricative, occurrence: SingleAndGeminate },
    Consonant { grapheme: "ci, ce", example: "città", ipa: "tʃ", manner: Affricate, occurrence: SingleAndGeminate },
    Consonant { grapheme: "f", example: "fiamme", ipa: "f", manner: Fricative, occurrence: SingleAndGeminate },
    Consonant { grapheme: "g", example: "gatto", ipa: "g", manner: Stop, occurrence: SingleAndGeminate },
    Consonant { grapheme: "b", example: "bambino", ipa: "b", manner: Stop, occurrence: SingleAndGeminate },
    Consonant { grapheme: "gi", example: "giardino", ipa: "dʒ", manner: Affricate, occurrence: SingleAndGeminate },
    Consonant { grapheme: "z", example: "zitto", ipa: "ts", manner: Affricate, occurrence: OnlyGeminate },
    Consonant { grapheme: "gl", example: "figlio", ipa: "ʎ", manner: Liquid, occurrence: OnlyGeminate },
    Consonant { grapheme: "sci", example: "scienzato", ipa: "ʃ", manner: Fricative, occurrence: OnlyGeminate },
    Consonant { grapheme: "z", example: "zoo", ipa: "dz", manner: Affricate, occurrence: OnlyGeminate },
    Consonant { grapheme: "s", example: "svetta", ipa: "z", manner: Fricative, occurrence: NeverGeminate },
    Consonant { grapheme: "gn", example: "gnomi", ipa: "ɲ", manner: Nasal, occurrence: OnlyGeminate },
];

pub const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ɛ", "ɔ"];

const ASCII_ALIASES: &[(&str, &str)] = &[
    ("tS", "tʃ"),
    ("dZ", "dʒ"),
    ("S", "ʃ"),
    ("L", "ʎ"),
    ("J", "ɲ"),
    ("E", "ɛ"),
    ("O", "ɔ"),
];

/// Reduces a phone label to its base phoneme: strips length marks, folds a
/// doubled spelling (`tt`, `tʃtʃ`) to one copy and maps ASCII aliases.
pub fn base_phoneme(label: &str) -> String {
    let trimmed = label.trim().trim_end_matches(['ː', ':']);
    let chars: Vec<char> = trimmed.chars().collect();
    let half = chars.len() / 2;
    let folded: String = if chars.len() >= 2 && chars.len().is_multiple_of(2) && chars[..half] == chars[half..] {
        chars[..half].iter().collect()
    } else {
        trimmed.to_string()
    };
    ASCII_ALIASES
        .iter()
        .find(|(alias, _)| *alias == folded)
        .map(|(_, ipa)| ipa.to_string())
        .unwrap_or(folded)
}

pub fn lookup(label: &str) -> Option<&'static Consonant> {
    let base = base_phoneme(label);
    CONSONANTS.iter().find(|c| c.ipa == base)
}

pub fn is_vowel(label: &str) -> bool {
    let base = base_phoneme(label).to_lowercase();
    let base = base.trim_end_matches(['\u{301}', '\u{300}']);
    VOWELS.contains(&base)
        || matches!(base, "à" | "è" | "é" | "ì" | "ò" | "ó" | "ù")
}

pub fn is_stop(label: &str) -> bool {
    lookup(label).is_some_and(|c| c.manner == Stop)
}
