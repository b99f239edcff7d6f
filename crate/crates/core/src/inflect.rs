//! Rule-based English inflection.
//!
//! Produces the base form plus regular inflections (plural / third person,
//! past, past participle, gerund, and comparative / superlative for known
//! adjectives). Irregular verbs, nouns and adjectives come from small tables.
//! Over-generation is tolerated: implausible forms lose during path search.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

/// (base, past, past participle); forms separated by `/` when there are several.
const IRREGULAR_VERBS: &[(&str, &str, &str)] = &[
    ("arise", "arose", "arisen"),
    ("awake", "awoke", "awoken"),
    ("bear", "bore", "borne/born"),
    ("beat", "beat", "beaten"),
    ("become", "became", "become"),
    ("befall", "befell", "befallen"),
    ("begin", "began", "begun"),
    ("behold", "beheld", "beheld"),
    ("bend", "bent", "bent"),
    ("beseech", "besought", "besought"),
    ("bet", "bet", "bet"),
    ("bid", "bade/bid", "bidden/bid"),
    ("bind", "bound", "bound"),
    ("bite", "bit", "bitten"),
    ("bleed", "bled", "bled"),
    ("blow", "blew", "blown"),
    ("break", "broke", "broken"),
    ("breed", "bred", "bred"),
    ("bring", "brought", "brought"),
    ("build", "built", "built"),
    ("burn", "burnt/burned", "burnt/burned"),
    ("burst", "burst", "burst"),
    ("buy", "bought", "bought"),
    ("cast", "cast", "cast"),
    ("catch", "caught", "caught"),
    ("choose", "chose", "chosen"),
    ("cling", "clung", "clung"),
    ("come", "came", "come"),
    ("cost", "cost", "cost"),
    ("creep", "crept", "crept"),
    ("cut", "cut", "cut"),
    ("deal", "dealt", "dealt"),
    ("dig", "dug", "dug"),
    ("dive", "dove/dived", "dived"),
    ("do", "did", "done"),
    ("draw", "drew", "drawn"),
    ("dream", "dreamt/dreamed", "dreamt/dreamed"),
    ("drink", "drank", "drunk"),
    ("drive", "drove", "driven"),
    ("dwell", "dwelt", "dwelt"),
    ("eat", "ate", "eaten"),
    ("fall", "fell", "fallen"),
    ("feed", "fed", "fed"),
    ("feel", "felt", "felt"),
    ("fight", "fought", "fought"),
    ("find", "found", "found"),
    ("flee", "fled", "fled"),
    ("fling", "flung", "flung"),
    ("fly", "flew", "flown"),
    ("forbid", "forbade", "forbidden"),
    ("forecast", "forecast", "forecast"),
    ("foresee", "foresaw", "foreseen"),
    ("foretell", "foretold", "foretold"),
    ("forget", "forgot", "forgotten"),
    ("forgive", "forgave", "forgiven"),
    ("forsake", "forsook", "forsaken"),
    ("freeze", "froze", "frozen"),
    ("get", "got", "got/gotten"),
    ("give", "gave", "given"),
    ("go", "went", "gone"),
    ("grind", "ground", "ground"),
    ("grow", "grew", "grown"),
    ("hang", "hung/hanged", "hung/hanged"),
    ("have", "had", "had"),
    ("hear", "heard", "heard"),
    ("hide", "hid", "hidden"),
    ("hit", "hit", "hit"),
    ("hold", "held", "held"),
    ("hurt", "hurt", "hurt"),
    ("keep", "kept", "kept"),
    ("kneel", "knelt", "knelt"),
    ("knit", "knit", "knit"),
    ("know", "knew", "known"),
    ("lay", "laid", "laid"),
    ("lead", "led", "led"),
    ("lean", "leant/leaned", "leant/leaned"),
    ("leap", "leapt/leaped", "leapt/leaped"),
    ("learn", "learnt/learned", "learnt/learned"),
    ("leave", "left", "left"),
    ("lend", "lent", "lent"),
    ("let", "let", "let"),
    ("lie", "lay", "lain"),
    ("light", "lit/lighted", "lit/lighted"),
    ("lose", "lost", "lost"),
    ("make", "made", "made"),
    ("mean", "meant", "meant"),
    ("meet", "met", "met"),
    ("mislay", "mislaid", "mislaid"),
    ("mislead", "misled", "misled"),
    ("mistake", "mistook", "mistaken"),
    ("misunderstand", "misunderstood", "misunderstood"),
    ("mow", "mowed", "mown"),
    ("overcome", "overcame", "overcome"),
    ("overdo", "overdid", "overdone"),
    ("overhear", "overheard", "overheard"),
    ("overtake", "overtook", "overtaken"),
    ("overthrow", "overthrew", "overthrown"),
    ("pay", "paid", "paid"),
    ("prove", "proved", "proven/proved"),
    ("put", "put", "put"),
    ("quit", "quit", "quit"),
    ("read", "read", "read"),
    ("rend", "rent", "rent"),
    ("rid", "rid", "rid"),
    ("ride", "rode", "ridden"),
    ("ring", "rang", "rung"),
    ("rise", "rose", "risen"),
    ("run", "ran", "run"),
    ("saw", "sawed", "sawn"),
    ("say", "said", "said"),
    ("see", "saw", "seen"),
    ("seek", "sought", "sought"),
    ("sell", "sold", "sold"),
    ("send", "sent", "sent"),
    ("set", "set", "set"),
    ("sew", "sewed", "sewn"),
    ("shake", "shook", "shaken"),
    ("shear", "sheared", "shorn"),
    ("shed", "shed", "shed"),
    ("shine", "shone", "shone"),
    ("shoot", "shot", "shot"),
    ("show", "showed", "shown"),
    ("shrink", "shrank", "shrunk"),
    ("shut", "shut", "shut"),
    ("sing", "sang", "sung"),
    ("sink", "sank", "sunk"),
    ("sit", "sat", "sat"),
    ("slay", "slew", "slain"),
    ("sleep", "slept", "slept"),
    ("slide", "slid", "slid"),
    ("sling", "slung", "slung"),
    ("slink", "slunk", "slunk"),
    ("slit", "slit", "slit"),
    ("smell", "smelt/smelled", "smelt/smelled"),
    ("smite", "smote", "smitten"),
    ("sow", "sowed", "sown"),
    ("speak", "spoke", "spoken"),
    ("speed", "sped", "sped"),
    ("spell", "spelt/spelled", "spelt/spelled"),
    ("spend", "spent", "spent"),
    ("spill", "spilt/spilled", "spilt/spilled"),
    ("spin", "spun", "spun"),
    ("spit", "spat", "spat"),
    ("split", "split", "split"),
    ("spoil", "spoilt/spoiled", "spoilt/spoiled"),
    ("spread", "spread", "spread"),
    ("spring", "sprang", "sprung"),
    ("stand", "stood", "stood"),
    ("steal", "stole", "stolen"),
    ("stick", "stuck", "stuck"),
    ("sting", "stung", "stung"),
    ("stink", "stank", "stunk"),
    ("stride", "strode", "stridden"),
    ("strike", "struck", "struck/stricken"),
    ("string", "strung", "strung"),
    ("strive", "strove", "striven"),
    ("swear", "swore", "sworn"),
    ("sweep", "swept", "swept"),
    ("swell", "swelled", "swollen"),
    ("swim", "swam", "swum"),
    ("swing", "swung", "swung"),
    ("take", "took", "taken"),
    ("teach", "taught", "taught"),
    ("tear", "tore", "torn"),
    ("tell", "told", "told"),
    ("think", "thought", "thought"),
    ("thrive", "throve/thrived", "thriven/thrived"),
    ("throw", "threw", "thrown"),
    ("thrust", "thrust", "thrust"),
    ("tread", "trod", "trodden"),
    ("undergo", "underwent", "undergone"),
    ("understand", "understood", "understood"),
    ("undertake", "undertook", "undertaken"),
    ("undo", "undid", "undone"),
    ("uphold", "upheld", "upheld"),
    ("upset", "upset", "upset"),
    ("wake", "woke", "woken"),
    ("wear", "wore", "worn"),
    ("weave", "wove", "woven"),
    ("weep", "wept", "wept"),
    ("win", "won", "won"),
    ("wind", "wound", "wound"),
    ("withdraw", "withdrew", "withdrawn"),
    ("withhold", "withheld", "withheld"),
    ("withstand", "withstood", "withstood"),
    ("wring", "wrung", "wrung"),
    ("write", "wrote", "written"),
];

/// Verbs whose present tense is irregular too.
const IRREGULAR_PRESENT: &[(&str, &[&str])] = &[
    ("be", &["am", "is", "are", "was", "were", "been", "being"]),
    ("have", &["has"]),
    ("do", &["does"]),
    ("go", &["goes"]),
];

const IRREGULAR_PLURALS: &[(&str, &str)] = &[
    ("man", "men"),
    ("woman", "women"),
    ("child", "children"),
    ("foot", "feet"),
    ("tooth", "teeth"),
    ("goose", "geese"),
    ("mouse", "mice"),
    ("ox", "oxen"),
    ("person", "people"),
    ("life", "lives"),
    ("wife", "wives"),
    ("knife", "knives"),
    ("wolf", "wolves"),
    ("half", "halves"),
    ("leaf", "leaves"),
    ("loaf", "loaves"),
    ("self", "selves"),
    ("shelf", "shelves"),
    ("thief", "thieves"),
    ("calf", "calves"),
    ("sheaf", "sheaves"),
    ("crisis", "crises"),
    ("analysis", "analyses"),
    ("phenomenon", "phenomena"),
    ("criterion", "criteria"),
    ("datum", "data"),
];

/// Adjectives with irregular comparison.
const IRREGULAR_ADJECTIVES: &[(&str, &str, &str)] = &[
    ("good", "better", "best"),
    ("well", "better", "best"),
    ("bad", "worse", "worst"),
    ("ill", "worse", "worst"),
    ("far", "farther/further", "farthest/furthest"),
    ("little", "less", "least"),
    ("many", "more", "most"),
    ("much", "more", "most"),
    ("old", "older/elder", "oldest/eldest"),
];

/// Adjectives that take -er / -est.
const GRADABLE: &[&str] = &[
    "big", "black", "bold", "brave", "bright", "broad", "busy", "calm", "cheap", "clean", "clear",
    "close", "cold", "cool", "dark", "dead", "dear", "deep", "dry", "dull", "early", "easy",
    "fair", "fast", "fat", "few", "fierce", "fine", "firm", "flat", "fond", "free", "fresh",
    "full", "gentle", "grand", "great", "green", "grim", "happy", "hard", "harsh", "heavy", "high",
    "hot", "huge", "humble", "hungry", "keen", "kind", "large", "late", "lazy", "light", "long",
    "loose", "loud", "lovely", "low", "lucky", "mad", "mean", "mild", "narrow", "near", "neat",
    "new", "nice", "noble", "odd", "pale", "plain", "polite", "poor", "proud", "pure", "quick",
    "quiet", "rare", "rich", "ripe", "rough", "round", "rude", "sad", "safe", "shallow", "sharp",
    "short", "shy", "simple", "slight", "slim", "slow", "small", "smart", "smooth", "soft", "sore",
    "sound", "sour", "steep", "stern", "still", "strange", "strict", "strong", "stupid", "sure",
    "sweet", "swift", "tall", "tender", "thick", "thin", "tight", "tiny", "tough", "true", "ugly",
    "vast", "warm", "weak", "wealthy", "weary", "wet", "white", "wide", "wild", "wise", "worthy",
    "young",
];

/// Closed-class words that never inflect.
const UNINFLECTED: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "ah",
    "all",
    "almost",
    "along",
    "also",
    "although",
    "always",
    "among",
    "an",
    "and",
    "another",
    "any",
    "anybody",
    "anyone",
    "anything",
    "around",
    "as",
    "at",
    "because",
    "before",
    "behind",
    "below",
    "beneath",
    "beside",
    "besides",
    "between",
    "beyond",
    "both",
    "but",
    "by",
    "can",
    "could",
    "during",
    "each",
    "either",
    "else",
    "enough",
    "ever",
    "every",
    "everybody",
    "everyone",
    "everything",
    "except",
    "for",
    "from",
    "he",
    "hence",
    "her",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "however",
    "i",
    "if",
    "in",
    "into",
    "it",
    "its",
    "itself",
    "just",
    "lest",
    "may",
    "me",
    "might",
    "mine",
    "must",
    "my",
    "myself",
    "neither",
    "never",
    "no",
    "nobody",
    "none",
    "nor",
    "not",
    "nothing",
    "now",
    "o",
    "of",
    "off",
    "oh",
    "on",
    "once",
    "one",
    "only",
    "onto",
    "or",
    "other",
    "ought",
    "our",
    "ours",
    "ourselves",
    "over",
    "perhaps",
    "shall",
    "she",
    "should",
    "since",
    "so",
    "some",
    "somebody",
    "someone",
    "something",
    "such",
    "than",
    "that",
    "the",
    "thee",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "therefore",
    "these",
    "they",
    "this",
    "those",
    "thou",
    "though",
    "through",
    "throughout",
    "thus",
    "thy",
    "till",
    "to",
    "too",
    "toward",
    "towards",
    "under",
    "unless",
    "until",
    "unto",
    "up",
    "upon",
    "us",
    "very",
    "was",
    "we",
    "were",
    "what",
    "whatever",
    "when",
    "whence",
    "where",
    "whether",
    "which",
    "while",
    "whilst",
    "who",
    "whoever",
    "whom",
    "whose",
    "why",
    "will",
    "with",
    "within",
    "without",
    "would",
    "ye",
    "yes",
    "yet",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

struct Tables {
    verbs: HashMap<&'static str, (Vec<&'static str>, Vec<&'static str>)>,
    present: HashMap<&'static str, &'static [&'static str]>,
    plurals: HashMap<&'static str, &'static str>,
    adjectives: HashMap<&'static str, (Vec<&'static str>, Vec<&'static str>)>,
    gradable: HashSet<&'static str>,
    uninflected: HashSet<&'static str>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| Tables {
        verbs: IRREGULAR_VERBS
            .iter()
            .map(|(base, past, part)| {
                (
                    *base,
                    (past.split('/').collect(), part.split('/').collect()),
                )
            })
            .collect(),
        present: IRREGULAR_PRESENT.iter().copied().collect(),
        plurals: IRREGULAR_PLURALS.iter().copied().collect(),
        adjectives: IRREGULAR_ADJECTIVES
            .iter()
            .map(|(base, comp, sup)| (*base, (comp.split('/').collect(), sup.split('/').collect())))
            .collect(),
        gradable: GRADABLE.iter().copied().collect(),
        uninflected: UNINFLECTED.iter().copied().collect(),
    })
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Single-syllable consonant-vowel-consonant endings double the final
/// consonant: stop -> stopped, big -> bigger.
fn doubles_final(word: &str) -> bool {
    let b = word.as_bytes();
    let n = b.len();
    if n < 3 {
        return false;
    }
    let (c1, v, c2) = (b[n - 3], b[n - 2], b[n - 1]);
    if is_vowel(c1) || !is_vowel(v) || is_vowel(c2) || matches!(c2, b'w' | b'x' | b'y') {
        return false;
    }
    let vowel_groups = b
        .iter()
        .enumerate()
        .filter(|&(i, &c)| is_vowel(c) && (i == 0 || !is_vowel(b[i - 1])))
        .count();
    vowel_groups == 1
}

fn ends_consonant_y(word: &str) -> bool {
    let b = word.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b'y' && !is_vowel(b[b.len() - 2])
}

fn s_form(word: &str) -> String {
    if word.ends_with('s')
        || word.ends_with('x')
        || word.ends_with('z')
        || word.ends_with("ch")
        || word.ends_with("sh")
    {
        format!("{word}es")
    } else if ends_consonant_y(word) {
        format!("{}ies", &word[..word.len() - 1])
    } else if word.len() >= 2 && word.ends_with('o') && !is_vowel(word.as_bytes()[word.len() - 2]) {
        format!("{word}es")
    } else {
        format!("{word}s")
    }
}

fn ed_form(word: &str) -> String {
    if word.ends_with('e') {
        format!("{word}d")
    } else if ends_consonant_y(word) {
        format!("{}ied", &word[..word.len() - 1])
    } else if doubles_final(word) {
        format!("{word}{}ed", &word[word.len() - 1..])
    } else {
        format!("{word}ed")
    }
}

fn ing_form(word: &str) -> String {
    if let Some(stem) = word.strip_suffix("ie") {
        format!("{stem}ying")
    } else if word.ends_with('e')
        && word.len() > 2
        && !word.ends_with("ee")
        && !word.ends_with("ye")
        && !word.ends_with("oe")
    {
        format!("{}ing", &word[..word.len() - 1])
    } else if doubles_final(word) {
        format!("{word}{}ing", &word[word.len() - 1..])
    } else {
        format!("{word}ing")
    }
}

fn er_est_forms(word: &str) -> [String; 2] {
    if word.ends_with('e') {
        [format!("{word}r"), format!("{word}st")]
    } else if ends_consonant_y(word) {
        let stem = &word[..word.len() - 1];
        [format!("{stem}ier"), format!("{stem}iest")]
    } else if doubles_final(word) {
        let last = &word[word.len() - 1..];
        [format!("{word}{last}er"), format!("{word}{last}est")]
    } else {
        [format!("{word}er"), format!("{word}est")]
    }
}

/// The base form followed by its distinct inflections, base first, no duplicates.
pub fn inflections(word: &str) -> Vec<String> {
    let t = tables();
    let mut out: Vec<String> = vec![word.to_string()];
    let push = |form: String, out: &mut Vec<String>| {
        if !form.is_empty() && !out.contains(&form) {
            out.push(form);
        }
    };

    let simple = !word.is_empty() && word.bytes().all(|b| b.is_ascii_lowercase());
    if !simple || t.uninflected.contains(word) {
        return out;
    }

    if let Some((comp, sup)) = t.adjectives.get(word) {
        for f in comp.iter().chain(sup) {
            push(f.to_string(), &mut out);
        }
        return out;
    }

    if let Some(present) = t.present.get(word) {
        for f in present.iter() {
            push(f.to_string(), &mut out);
        }
    } else if let Some(plural) = t.plurals.get(word) {
        push(plural.to_string(), &mut out);
    } else {
        push(s_form(word), &mut out);
    }

    match t.verbs.get(word) {
        Some((past, part)) => {
            for f in past.iter().chain(part) {
                push(f.to_string(), &mut out);
            }
        }
        None if word != "be" => push(ed_form(word), &mut out),
        None => {}
    }
    if word != "be" {
        push(ing_form(word), &mut out);
    }

    if t.gradable.contains(word) {
        for f in er_est_forms(word) {
            push(f, &mut out);
        }
    }
    out
}

/// Forms of `word` selected by a suffix marker.
///
/// Keeps forms ending with the marker; when none do, the full expansion is
/// returned.
pub fn forms_for_marker(word: &str, marker: Option<&str>) -> Vec<String> {
    let forms = inflections(word);
    match marker {
        Some(m) if !m.is_empty() => {
            let matching: Vec<String> = forms.iter().filter(|f| f.ends_with(m)).cloned().collect();
            if matching.is_empty() {
                forms
            } else {
                matching
            }
        }
        _ => forms,
    }
}

/// Markers tried first when choosing how to flag an inflected form.
const PREFERRED_MARKERS: &[&str] = &["ing", "ed", "d", "s", "es", "er", "est", "n", "en", "y"];

/// Picks a suffix marker that singles out `form` among the inflections of
/// `lemma`. Returns `None` when `form` is not an inflection of `lemma` or no
/// suffix identifies it uniquely.
pub fn marker_for(lemma: &str, form: &str) -> Option<String> {
    if lemma == form {
        return None;
    }
    let forms = inflections(lemma);
    if !forms.iter().any(|f| f == form) {
        return None;
    }
    let unique = |marker: &str| {
        forms
            .iter()
            .filter(|f| f.ends_with(marker))
            .all(|f| f == form)
            && form.ends_with(marker)
    };
    if let Some(m) = PREFERRED_MARKERS.iter().find(|m| unique(m)) {
        return Some(m.to_string());
    }
    let chars: Vec<(usize, char)> = form.char_indices().collect();
    (1..=chars.len())
        .map(|k| &form[chars[chars.len() - k].0..])
        .find(|m| unique(m))
        .map(str::to_string)
}

/// Lemmas in `is_lemma` of which `form` is an inflection, found by undoing
/// the regular rules and consulting the irregular tables.
pub fn lemma_candidates(form: &str, is_lemma: impl Fn(&str) -> bool) -> Vec<String> {
    let t = tables();
    let mut guesses: BTreeSet<String> = BTreeSet::new();
    let mut add = |s: String| {
        if !s.is_empty() && s != form {
            guesses.insert(s);
        }
    };
    for (base, (past, part)) in &t.verbs {
        if past.contains(&form) || part.contains(&form) {
            add(base.to_string());
        }
    }
    for (base, forms) in &t.present {
        if forms.contains(&form) {
            add(base.to_string());
        }
    }
    for (base, plural) in &t.plurals {
        if *plural == form {
            add(base.to_string());
        }
    }
    for (base, (comp, sup)) in &t.adjectives {
        if comp.contains(&form) || sup.contains(&form) {
            add(base.to_string());
        }
    }
    for (suffix, replacements) in [
        ("ies", &["y"][..]),
        ("ied", &["y"][..]),
        ("ier", &["y"][..]),
        ("iest", &["y"][..]),
        ("ying", &["ie"][..]),
        ("es", &["", "e"][..]),
        ("s", &[""][..]),
        ("ed", &["", "e"][..]),
        ("d", &[""][..]),
        ("ing", &["", "e"][..]),
        ("er", &["", "e"][..]),
        ("est", &["", "e"][..]),
        ("r", &[""][..]),
        ("st", &[""][..]),
    ] {
        if let Some(stem) = form.strip_suffix(suffix) {
            for r in replacements {
                add(format!("{stem}{r}"));
            }
            let b = stem.as_bytes();
            if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                add(stem[..stem.len() - 1].to_string());
            }
        }
    }
    guesses
        .into_iter()
        .filter(|lemma| is_lemma(lemma) && inflections(lemma).iter().any(|f| f == form))
        .collect()
}
