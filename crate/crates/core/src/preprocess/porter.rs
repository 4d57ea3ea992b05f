//! Porter suffix-stripping stemmer.
//!
//! This follows the NLTK flavour of the algorithm rather than the 1980
//! original: a small pool of irregular forms, words of one or two letters
//! are left alone, a final `y` only becomes `i` after a consonant that is
//! not the whole stem, and step 2 knows `alli`, `bli`, `fulli` and `logi`.
//! Those extensions are what make `they` stay `they` while `only` becomes
//! `onli`.

const IRREGULAR_FORMS: &[(&str, &str)] = &[
    ("sky", "sky"),
    ("skies", "sky"),
    ("dying", "die"),
    ("lying", "lie"),
    ("tying", "tie"),
    ("news", "news"),
    ("innings", "inning"),
    ("inning", "inning"),
    ("outings", "outing"),
    ("outing", "outing"),
    ("cannings", "canning"),
    ("canning", "canning"),
    ("howe", "howe"),
    ("proceed", "proceed"),
    ("exceed", "exceed"),
    ("succeed", "succeed"),
];

/// Stems a single word. The input is lowercased first.
pub fn stem(word: &str) -> String {
    let lower = word.to_lowercase();
    if let Some((_, irregular)) = IRREGULAR_FORMS.iter().find(|(form, _)| *form == lower) {
        return (*irregular).to_string();
    }
    let mut w: Vec<char> = lower.chars().collect();
    if w.len() <= 2 {
        return lower;
    }
    w = step1a(w);
    w = step1b(w);
    w = step1c(w);
    w = step2(w);
    w = step3(w);
    w = step4(w);
    w = step5a(w);
    w = step5b(w);
    w.into_iter().collect()
}

fn is_vowel_letter(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// `true` marks a consonant. A `y` is a consonant at the start of a word or
/// after a vowel, and a vowel after a consonant.
fn consonant_flags(w: &[char]) -> Vec<bool> {
    let mut flags: Vec<bool> = Vec::with_capacity(w.len());
    for (i, &c) in w.iter().enumerate() {
        let consonant = if is_vowel_letter(c) {
            false
        } else if c == 'y' {
            i == 0 || !flags[i - 1]
        } else {
            true
        };
        flags.push(consonant);
    }
    flags
}

fn is_consonant(w: &[char], i: usize) -> bool {
    consonant_flags(&w[..=i])[i]
}

/// Number of vowel-run/consonant-run pairs, the `m` in `[C](VC){m}[V]`.
fn measure(w: &[char]) -> usize {
    consonant_flags(w)
        .windows(2)
        .filter(|pair| !pair[0] && pair[1])
        .count()
}

fn contains_vowel(w: &[char]) -> bool {
    consonant_flags(w).iter().any(|c| !c)
}

fn ends_double_consonant(w: &[char]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

/// `*o`: ends consonant-vowel-consonant where the last is not w, x or y.
/// Two-letter vowel-consonant stems also qualify.
fn ends_cvc(w: &[char]) -> bool {
    let n = w.len();
    if n >= 3 {
        let flags = consonant_flags(w);
        if flags[n - 3] && !flags[n - 2] && flags[n - 1] && !matches!(w[n - 1], 'w' | 'x' | 'y') {
            return true;
        }
    }
    n == 2 && !is_consonant(w, 0) && is_consonant(w, 1)
}

fn ends_with(w: &[char], suffix: &str) -> bool {
    let n = suffix.chars().count();
    w.len() >= n && w[w.len() - n..].iter().copied().eq(suffix.chars())
}

fn strip(w: &[char], suffix: &str) -> Vec<char> {
    w[..w.len() - suffix.chars().count()].to_vec()
}

fn with_suffix(mut stem: Vec<char>, suffix: &str) -> Vec<char> {
    stem.extend(suffix.chars());
    stem
}

#[derive(Clone, Copy)]
enum Cond {
    Always,
    MeasureGt0,
    MeasureGt1,
    /// (m>1 and (*S or *T))
    Ion,
    /// The `l` of `logi` counts towards the stem.
    Logi,
}

impl Cond {
    fn holds(self, word: &[char], stem: &[char]) -> bool {
        match self {
            Cond::Always => true,
            Cond::MeasureGt0 => measure(stem) > 0,
            Cond::MeasureGt1 => measure(stem) > 1,
            Cond::Ion => measure(stem) > 1 && matches!(stem.last(), Some('s' | 't')),
            Cond::Logi => measure(&word[..word.len() - 3]) > 0,
        }
    }
}

/// The first rule whose suffix matches decides: it either fires or the word
/// is returned unchanged.
fn apply_rules(word: Vec<char>, rules: &[(&str, &str, Cond)]) -> Vec<char> {
    for &(suffix, replacement, cond) in rules {
        if ends_with(&word, suffix) {
            let stem = strip(&word, suffix);
            return if cond.holds(&word, &stem) {
                with_suffix(stem, replacement)
            } else {
                word
            };
        }
    }
    word
}

fn step1a(w: Vec<char>) -> Vec<char> {
    if w.len() == 4 && ends_with(&w, "ies") {
        return with_suffix(strip(&w, "ies"), "ie");
    }
    apply_rules(
        w,
        &[
            ("sses", "ss", Cond::Always),
            ("ies", "i", Cond::Always),
            ("ss", "ss", Cond::Always),
            ("s", "", Cond::Always),
        ],
    )
}

fn step1b(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "ied") {
        let replacement = if w.len() == 4 { "ie" } else { "i" };
        return with_suffix(strip(&w, "ied"), replacement);
    }
    if ends_with(&w, "eed") {
        let stem = strip(&w, "eed");
        return if measure(&stem) > 0 {
            with_suffix(stem, "ee")
        } else {
            w
        };
    }
    let stem = match ["ed", "ing"]
        .iter()
        .filter(|suffix| ends_with(&w, suffix))
        .map(|suffix| strip(&w, suffix))
        .find(|stem| contains_vowel(stem))
    {
        Some(stem) => stem,
        None => return w,
    };

    for (suffix, replacement) in [("at", "ate"), ("bl", "ble"), ("iz", "ize")] {
        if ends_with(&stem, suffix) {
            return with_suffix(strip(&stem, suffix), replacement);
        }
    }
    if ends_double_consonant(&stem) {
        let last = stem[stem.len() - 1];
        return if matches!(last, 'l' | 's' | 'z') {
            stem
        } else {
            stem[..stem.len() - 1].to_vec()
        };
    }
    if measure(&stem) == 1 && ends_cvc(&stem) {
        return with_suffix(stem, "e");
    }
    stem
}

fn step1c(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "y") {
        let stem = strip(&w, "y");
        if stem.len() > 1 && is_consonant(&stem, stem.len() - 1) {
            return with_suffix(stem, "i");
        }
    }
    w
}

fn step2(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "alli") && measure(&strip(&w, "alli")) > 0 {
        return step2(with_suffix(strip(&w, "alli"), "al"));
    }
    use Cond::MeasureGt0 as M;
    apply_rules(
        w,
        &[
            ("ational", "ate", M),
            ("tional", "tion", M),
            ("enci", "ence", M),
            ("anci", "ance", M),
            ("izer", "ize", M),
            ("bli", "ble", M),
            ("alli", "al", M),
            ("entli", "ent", M),
            ("eli", "e", M),
            ("ousli", "ous", M),
            ("ization", "ize", M),
            ("ation", "ate", M),
            ("ator", "ate", M),
            ("alism", "al", M),
            ("iveness", "ive", M),
            ("fulness", "ful", M),
            ("ousness", "ous", M),
            ("aliti", "al", M),
            ("iviti", "ive", M),
            ("biliti", "ble", M),
            ("fulli", "ful", M),
            ("logi", "log", Cond::Logi),
        ],
    )
}

fn step3(w: Vec<char>) -> Vec<char> {
    use Cond::MeasureGt0 as M;
    apply_rules(
        w,
        &[
            ("icate", "ic", M),
            ("ative", "", M),
            ("alize", "al", M),
            ("iciti", "ic", M),
            ("ical", "ic", M),
            ("ful", "", M),
            ("ness", "", M),
        ],
    )
}

fn step4(w: Vec<char>) -> Vec<char> {
    use Cond::MeasureGt1 as M;
    apply_rules(
        w,
        &[
            ("al", "", M),
            ("ance", "", M),
            ("ence", "", M),
            ("er", "", M),
            ("ic", "", M),
            ("able", "", M),
            ("ible", "", M),
            ("ant", "", M),
            ("ement", "", M),
            ("ment", "", M),
            ("ent", "", M),
            ("ion", "", Cond::Ion),
            ("ou", "", M),
            ("ism", "", M),
            ("ate", "", M),
            ("iti", "", M),
            ("ous", "", M),
            ("ive", "", M),
            ("ize", "", M),
        ],
    )
}

fn step5a(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "e") {
        let stem = strip(&w, "e");
        let m = measure(&stem);
        if m > 1 || (m == 1 && !ends_cvc(&stem)) {
            return stem;
        }
    }
    w
}

fn step5b(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "ll") && measure(&w[..w.len() - 1]) > 1 {
        return w[..w.len() - 1].to_vec();
    }
    w
}
