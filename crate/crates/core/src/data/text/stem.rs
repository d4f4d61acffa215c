//! Porter (1980) suffix-stripping stemmer over lowercase ASCII words.

struct Word {
    b: Vec<u8>,
    /// End of the stem under consideration (exclusive).
    k: usize,
}

impl Word {
    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `b[..j]`.
    fn measure(&self, j: usize) -> usize {
        let mut n = 0;
        let mut i = 0;
        while i < j && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < j && !self.is_consonant(i) {
                i += 1;
            }
            if i >= j {
                return n;
            }
            while i < j && self.is_consonant(i) {
                i += 1;
            }
            n += 1;
            if i >= j {
                return n;
            }
        }
    }

    fn has_vowel(&self, j: usize) -> bool {
        (0..j).any(|i| !self.is_consonant(i))
    }

    fn double_consonant(&self, j: usize) -> bool {
        j >= 2 && self.b[j - 1] == self.b[j - 2] && self.is_consonant(j - 1)
    }

    /// consonant-vowel-consonant ending at `j - 1`, last not w, x or y
    fn cvc(&self, j: usize) -> bool {
        if j < 3
            || !self.is_consonant(j - 1)
            || self.is_consonant(j - 2)
            || !self.is_consonant(j - 3)
        {
            return false;
        }
        !matches!(self.b[j - 1], b'w' | b'x' | b'y')
    }

    fn ends(&self, s: &str) -> bool {
        self.b[..self.k].ends_with(s.as_bytes())
    }

    fn stem_len(&self, suffix: &str) -> usize {
        self.k - suffix.len()
    }

    fn set_to(&mut self, suffix: &str, rep: &str) {
        let j = self.stem_len(suffix);
        self.b.truncate(j);
        self.b.extend_from_slice(rep.as_bytes());
        self.k = self.b.len();
    }

    /// Replace `suffix` by `rep` when the remaining stem has measure > `min_m`.
    fn replace_if(&mut self, suffix: &str, rep: &str, min_m: usize) -> bool {
        if !self.ends(suffix) {
            return false;
        }
        if self.measure(self.stem_len(suffix)) > min_m {
            self.set_to(suffix, rep);
        }
        true
    }

    fn step1ab(&mut self) {
        if self.ends("sses") {
            self.set_to("sses", "ss");
        } else if self.ends("ies") {
            self.set_to("ies", "i");
        } else if self.ends("ss") {
        } else if self.ends("s") {
            self.set_to("s", "");
        }

        if self.ends("eed") {
            if self.measure(self.stem_len("eed")) > 0 {
                self.set_to("eed", "ee");
            }
            return;
        }
        let stripped = if self.ends("ed") && self.has_vowel(self.stem_len("ed")) {
            self.set_to("ed", "");
            true
        } else if self.ends("ing") && self.has_vowel(self.stem_len("ing")) {
            self.set_to("ing", "");
            true
        } else {
            false
        };
        if !stripped {
            return;
        }
        if self.ends("at") || self.ends("bl") || self.ends("iz") {
            self.b.push(b'e');
            self.k += 1;
        } else if self.double_consonant(self.k) {
            if !matches!(self.b[self.k - 1], b'l' | b's' | b'z') {
                self.b.pop();
                self.k -= 1;
            }
        } else if self.measure(self.k) == 1 && self.cvc(self.k) {
            self.b.push(b'e');
            self.k += 1;
        }
    }

    fn step1c(&mut self) {
        if self.ends("y") && self.has_vowel(self.k - 1) {
            self.b[self.k - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("ational", "ate"),
            ("tional", "tion"),
            ("enci", "ence"),
            ("anci", "ance"),
            ("izer", "ize"),
            ("bli", "ble"),
            ("alli", "al"),
            ("entli", "ent"),
            ("eli", "e"),
            ("ousli", "ous"),
            ("ization", "ize"),
            ("ation", "ate"),
            ("ator", "ate"),
            ("alism", "al"),
            ("iveness", "ive"),
            ("fulness", "ful"),
            ("ousness", "ous"),
            ("aliti", "al"),
            ("iviti", "ive"),
            ("biliti", "ble"),
            ("logi", "log"),
        ];
        for (suf, rep) in RULES {
            if self.replace_if(suf, rep, 0) {
                return;
            }
        }
    }

    fn step3(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("icate", "ic"),
            ("ative", ""),
            ("alize", "al"),
            ("iciti", "ic"),
            ("ical", "ic"),
            ("ful", ""),
            ("ness", ""),
        ];
        for (suf, rep) in RULES {
            if self.replace_if(suf, rep, 0) {
                return;
            }
        }
    }

    fn step4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ion",
            "ou", "ism", "ate", "iti", "ous", "ive", "ize",
        ];
        for suf in SUFFIXES {
            if !self.ends(suf) {
                continue;
            }
            let j = self.stem_len(suf);
            if *suf == "ion" && !(j > 0 && matches!(self.b[j - 1], b's' | b't')) {
                continue;
            }
            if self.measure(j) > 1 {
                self.set_to(suf, "");
            }
            return;
        }
    }

    fn step5(&mut self) {
        if self.ends("e") {
            let j = self.k - 1;
            let m = self.measure(j);
            if m > 1 || (m == 1 && !self.cvc(j)) {
                self.b.pop();
                self.k -= 1;
            }
        }
        if self.ends("ll") && self.measure(self.k) > 1 {
            self.b.pop();
            self.k -= 1;
        }
    }
}

/// One pass of the Porter algorithm. Words of two letters or fewer and
/// words containing non-ASCII-lowercase bytes are returned unchanged.
pub fn porter_stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|c| c.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w = Word {
        b: word.as_bytes().to_vec(),
        k: word.len(),
    };
    w.step1ab();
    if w.k > 1 {
        w.step1c();
        w.step2();
        w.step3();
        w.step4();
        w.step5();
    }
    String::from_utf8(w.b).expect("ASCII in, ASCII out")
}

/// Porter stemming iterated until the word stops changing, so that
/// stemming an already-stemmed word is a no-op.
pub fn stem(word: &str) -> String {
    let mut cur = porter_stem(word);
    for _ in 0..8 {
        let next = porter_stem(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}
