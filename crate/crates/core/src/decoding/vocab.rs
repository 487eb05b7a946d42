use std::collections::HashMap;

pub type TokenId = u32;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const BOS_ID: TokenId = 0;
pub const EOS_ID: TokenId = 1;

/// Target vocabulary of a model. Ids 0 and 1 are always BOS and EOS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    ids: HashMap<String, TokenId>,
}

impl Vocab {
    /// BOS and EOS followed by `tokens` in order, skipping repeats.
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocab {
            tokens: Vec::new(),
            ids: HashMap::new(),
        };
        vocab.push(BOS.to_string());
        vocab.push(EOS.to_string());
        for tok in tokens {
            vocab.push(tok.into());
        }
        vocab
    }

    fn push(&mut self, tok: String) {
        if !self.ids.contains_key(&tok) {
            self.ids.insert(tok.clone(), self.tokens.len() as TokenId);
            self.tokens.push(tok);
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Space-joined output tokens with EOS dropped.
    pub fn render(&self, ids: &[TokenId]) -> String {
        ids.iter()
            .filter(|&&id| id != EOS_ID && id != BOS_ID)
            .map(|&id| self.token(id))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
