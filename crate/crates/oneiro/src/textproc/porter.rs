//! Porter (1980) suffix stripping.
//!
//! Operates on lowercase ASCII-alphabetic tokens; anything else passes
//! through unchanged. Within a step the longest matching suffix is selected
//! and its condition alone decides whether the step rewrites the word, per
//! the original longest-match convention. The algorithm is not idempotent in
//! general and no such claim is made.

/// Stems one token. Non-conforming tokens (non-ASCII, uppercase, digits,
/// length <= 2) are returned unchanged.
pub fn porter_stem(token: &str) -> String {
    let bytes = token.as_bytes();
    if bytes.len() <= 2 || !bytes.iter().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    let mut w = bytes.to_vec();
    step_1a(&mut w);
    step_1b(&mut w);
    step_1c(&mut w);
    step_2(&mut w);
    step_3(&mut w);
    step_4(&mut w);
    step_5a(&mut w);
    step_5b(&mut w);
    String::from_utf8(w).expect("ascii in, ascii out")
}

fn is_consonant(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_consonant(w, i - 1),
        _ => true,
    }
}

/// The measure m: number of vowel-consonant class transitions VC in the
/// form [C](VC)^m[V].
fn measure(w: &[u8]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..w.len() {
        let cons = is_consonant(w, i);
        if prev_vowel && cons {
            m += 1;
        }
        prev_vowel = !cons;
    }
    m
}

fn has_vowel(w: &[u8]) -> bool {
    (0..w.len()).any(|i| !is_consonant(w, i))
}

fn ends_double_consonant(w: &[u8]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

/// *o: stem ends consonant-vowel-consonant and the final consonant is not
/// w, x or y.
fn ends_cvc(w: &[u8]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], b'w' | b'x' | b'y')
}

fn ends_with(w: &[u8], suffix: &[u8]) -> bool {
    w.len() >= suffix.len() && &w[w.len() - suffix.len()..] == suffix
}

fn replace(w: &mut Vec<u8>, suffix_len: usize, replacement: &[u8]) {
    let keep = w.len() - suffix_len;
    w.truncate(keep);
    w.extend_from_slice(replacement);
}

/// Longest matching suffix among `rules`, or None.
fn longest<'r>(w: &[u8], rules: &'r [(&'r [u8], &'r [u8])]) -> Option<&'r (&'r [u8], &'r [u8])> {
    rules
        .iter()
        .filter(|(s, _)| ends_with(w, s))
        .max_by_key(|(s, _)| s.len())
}

fn step_1a(w: &mut Vec<u8>) {
    const RULES: [(&[u8], &[u8]); 4] = [
        (b"sses", b"ss"),
        (b"ies", b"i"),
        (b"ss", b"ss"),
        (b"s", b""),
    ];
    if let Some(&(suffix, rep)) = longest(w, &RULES) {
        replace(w, suffix.len(), rep);
    }
}

fn step_1b(w: &mut Vec<u8>) {
    if ends_with(w, b"eed") {
        if measure(&w[..w.len() - 3]) > 0 {
            w.truncate(w.len() - 1); // eed -> ee
        }
        return;
    }
    let removed = if ends_with(w, b"ed") && has_vowel(&w[..w.len() - 2]) {
        w.truncate(w.len() - 2);
        true
    } else if ends_with(w, b"ing") && has_vowel(&w[..w.len() - 3]) {
        w.truncate(w.len() - 3);
        true
    } else {
        false
    };
    if removed {
        if ends_with(w, b"at") || ends_with(w, b"bl") || ends_with(w, b"iz") {
            w.push(b'e');
        } else if ends_double_consonant(w) && !matches!(w[w.len() - 1], b'l' | b's' | b'z') {
            w.truncate(w.len() - 1);
        } else if measure(w) == 1 && ends_cvc(w) {
            w.push(b'e');
        }
    }
}

fn step_1c(w: &mut [u8]) {
    let n = w.len();
    if n >= 2 && w[n - 1] == b'y' && has_vowel(&w[..n - 1]) {
        w[n - 1] = b'i';
    }
}

fn step_2(w: &mut Vec<u8>) {
    const RULES: [(&[u8], &[u8]); 20] = [
        (b"ational", b"ate"),
        (b"tional", b"tion"),
        (b"enci", b"ence"),
        (b"anci", b"ance"),
        (b"izer", b"ize"),
        (b"abli", b"able"),
        (b"alli", b"al"),
        (b"entli", b"ent"),
        (b"eli", b"e"),
        (b"ousli", b"ous"),
        (b"ization", b"ize"),
        (b"ation", b"ate"),
        (b"ator", b"ate"),
        (b"alism", b"al"),
        (b"iveness", b"ive"),
        (b"fulness", b"ful"),
        (b"ousness", b"ous"),
        (b"aliti", b"al"),
        (b"iviti", b"ive"),
        (b"biliti", b"ble"),
    ];
    if let Some(&(suffix, rep)) = longest(w, &RULES) {
        if measure(&w[..w.len() - suffix.len()]) > 0 {
            replace(w, suffix.len(), rep);
        }
    }
}

fn step_3(w: &mut Vec<u8>) {
    const RULES: [(&[u8], &[u8]); 7] = [
        (b"icate", b"ic"),
        (b"ative", b""),
        (b"alize", b"al"),
        (b"iciti", b"ic"),
        (b"ical", b"ic"),
        (b"ful", b""),
        (b"ness", b""),
    ];
    if let Some(&(suffix, rep)) = longest(w, &RULES) {
        if measure(&w[..w.len() - suffix.len()]) > 0 {
            replace(w, suffix.len(), rep);
        }
    }
}

fn step_4(w: &mut Vec<u8>) {
    const SUFFIXES: [&[u8]; 19] = [
        b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment", b"ent",
        b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
    ];
    let best = SUFFIXES
        .iter()
        .filter(|s| ends_with(w, s))
        .max_by_key(|s| s.len());
    if let Some(&suffix) = best {
        let stem = &w[..w.len() - suffix.len()];
        if measure(stem) > 1 {
            // ion additionally requires the stem to end in s or t
            if suffix == b"ion" && !matches!(stem.last(), Some(b's') | Some(b't')) {
                return;
            }
            w.truncate(w.len() - suffix.len());
        }
    }
}

fn step_5a(w: &mut Vec<u8>) {
    if w.last() == Some(&b'e') {
        let stem = &w[..w.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            w.truncate(w.len() - 1);
        }
    }
}

fn step_5b(w: &mut Vec<u8>) {
    if w.last() == Some(&b'l') && ends_double_consonant(w) && measure(w) > 1 {
        w.truncate(w.len() - 1);
    }
}
