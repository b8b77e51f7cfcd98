use super::Vocabulary;
use crate::corpus::{pretokenize, CorpusMode};
use crate::error::{Error, Result};
use crate::END_OF_WORD;

impl Vocabulary {
    /// Encodes one input. Text mode splits on whitespace; sequence mode
    /// treats the whole input as a single record.
    pub fn encode(&self, input: &str) -> Vec<u32> {
        let mut ids = Vec::new();
        match self.mode() {
            CorpusMode::Text => {
                for word in pretokenize(input, CorpusMode::Text) {
                    ids.extend(self.encode_pretoken(word));
                }
            }
            CorpusMode::Sequence => ids.extend(self.encode_pretoken(input)),
        }
        ids
    }

    pub fn encode_tokens(&self, input: &str) -> Vec<&str> {
        self.encode(input)
            .into_iter()
            .map(|id| self.token(id).expect("encoder emits known ids"))
            .collect()
    }

    /// Encodes a single pre-token.
    ///
    /// Merge rules are replayed in rank order: at each step the pair with
    /// the smallest rank not below the last applied rank is rewritten at all
    /// of its non-overlapping left-to-right occurrences. This is exactly the
    /// sequence of rewrites the trainer performed on the same pre-token.
    pub fn encode_pretoken(&self, pretoken: &str) -> Vec<u32> {
        let mut symbols = self.initial_ids(pretoken);
        let mut cursor = 0u32;
        loop {
            let mut next: Option<(u32, (u32, u32), u32)> = None;
            for w in symbols.windows(2) {
                let Some(ranks) = self.merge_table.get(&(w[0], w[1])) else {
                    continue;
                };
                let at = ranks.partition_point(|&(rank, _)| rank < cursor);
                if let Some(&(rank, merged)) = ranks.get(at) {
                    if next.is_none_or(|(best, _, _)| rank < best) {
                        next = Some((rank, (w[0], w[1]), merged));
                    }
                }
            }
            let Some((rank, (left, right), merged)) = next else {
                break;
            };
            let mut out = Vec::with_capacity(symbols.len());
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(symbols[i]);
                    i += 1;
                }
            }
            symbols = out;
            cursor = rank + 1;
        }
        symbols
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        let mut out = String::new();
        for &id in ids {
            let token = self.token(id).ok_or(Error::InvalidId(id))?;
            out.push_str(token);
        }
        if self.mode() == CorpusMode::Text {
            out = out.replace(END_OF_WORD, " ");
            if out.ends_with(' ') {
                out.pop();
            }
        }
        Ok(out)
    }

    fn initial_ids(&self, pretoken: &str) -> Vec<u32> {
        let unk = self.unk_id();
        let mut ids = Vec::with_capacity(pretoken.len());
        let mut chars = pretoken.chars().peekable();
        while let Some(c) = chars.next() {
            let last = self.mode() == CorpusMode::Text && chars.peek().is_none();
            if !self.alphabet().contains(c) {
                ids.push(unk);
                if last {
                    ids.push(self.marker_id().expect("text mode has a marker"));
                }
                continue;
            }
            let id = if last {
                let mut buf = [0u8; 8];
                let s = c.encode_utf8(&mut buf);
                let len = s.len();
                END_OF_WORD.encode_utf8(&mut buf[len..]);
                let fused =
                    std::str::from_utf8(&buf[..len + END_OF_WORD.len_utf8()]).expect("valid utf-8");
                self.id(fused)
            } else {
                let mut buf = [0u8; 4];
                self.id(c.encode_utf8(&mut buf))
            };
            ids.push(id.unwrap_or(unk));
        }
        ids
    }
}
