use std::cmp::Ordering;

use crate::corpus::Sentence;
use crate::pieces::PieceTable;

use super::model::{validate_distribution, TranslationModel};
use super::reward::{step_rewards, RewardTable};
use super::vocab::{TokenId, BOS_ID, EOS_ID};
use super::{DecodeConfig, DecodeError};

/// A partial or complete output.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// Generated tokens, no BOS; ends with EOS when `finished`.
    pub tokens: Vec<TokenId>,
    /// Sum of model log-probabilities.
    pub base_logprob: f64,
    /// Sum of λ-weighted piece rewards.
    pub reward_total: f64,
    pub finished: bool,
}

impl Hypothesis {
    fn root() -> Self {
        Hypothesis {
            tokens: Vec::new(),
            base_logprob: 0.0,
            reward_total: 0.0,
            finished: false,
        }
    }

    pub fn guided_score(&self) -> f64 {
        self.base_logprob + self.reward_total
    }

    /// Guided score divided by the output length (EOS counted).
    pub fn normalized_score(&self) -> f64 {
        self.guided_score() / self.tokens.len().max(1) as f64
    }
}

/// Ranked n-best list, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub nbest: Vec<Hypothesis>,
}

impl DecodeResult {
    pub fn best(&self) -> &Hypothesis {
        &self.nbest[0]
    }
}

struct Candidate {
    parent: usize,
    token: TokenId,
    base: f64,
    reward: f64,
}

impl Candidate {
    fn guided(&self) -> f64 {
        self.base + self.reward
    }
}

// Higher guided score first; ties by parent rank then token id.
fn by_rank(a: &Candidate, b: &Candidate) -> Ordering {
    b.guided()
        .total_cmp(&a.guided())
        .then(a.parent.cmp(&b.parent))
        .then(a.token.cmp(&b.token))
}

/// Beam search with piece rewards taken from `table`.
pub fn beam_search<M: TranslationModel + ?Sized>(
    model: &M,
    source: &Sentence,
    table: &PieceTable,
    config: &DecodeConfig,
) -> Result<DecodeResult, DecodeError> {
    let rewards = RewardTable::compile(table, model.vocab());
    beam_search_compiled(model, source, &rewards, config)
}

/// Beam search over an already compiled reward table.
///
/// Each step expands every live hypothesis over the whole vocabulary, keeps
/// the best `beam_size - finished` candidates by cumulative guided score and
/// moves those ending in EOS to the finished pool. Decoding stops once
/// `beam_size` hypotheses have finished or the length limit is reached, in
/// which case the surviving live hypotheses join the pool unfinished. The
/// pool is ranked by length-normalized guided score.
pub fn beam_search_compiled<M: TranslationModel + ?Sized>(
    model: &M,
    source: &Sentence,
    table: &RewardTable,
    config: &DecodeConfig,
) -> Result<DecodeResult, DecodeError> {
    config.validate()?;
    let vocab_len = model.vocab().len();
    let max_len = config.max_len_for(source.len());
    let beam = config.beam_size;

    let mut live = vec![Hypothesis::root()];
    let mut pool: Vec<Hypothesis> = Vec::with_capacity(beam);
    let mut candidates: Vec<Candidate> = Vec::new();

    for _ in 0..max_len {
        if live.is_empty() || pool.len() >= beam {
            break;
        }
        candidates.clear();
        for (parent, hyp) in live.iter().enumerate() {
            let dist = model.next_log_distribution(source, &hyp.tokens);
            validate_distribution(&dist, vocab_len)?;
            let rewards = step_rewards(&hyp.tokens, table, config.lambda);
            let mut next_reward = rewards.iter().peekable();
            for (token, &logp) in dist.iter().enumerate() {
                let token = token as TokenId;
                let mut r = 0.0;
                while let Some(&&(id, value)) = next_reward.peek() {
                    if id > token {
                        break;
                    }
                    if id == token {
                        r = value;
                    }
                    next_reward.next();
                }
                if token == BOS_ID || logp == f64::NEG_INFINITY {
                    continue;
                }
                candidates.push(Candidate {
                    parent,
                    token,
                    base: hyp.base_logprob + logp,
                    reward: hyp.reward_total + r,
                });
            }
        }

        let keep = (beam - pool.len()).min(candidates.len());
        if keep == 0 {
            live.clear();
            break;
        }
        if candidates.len() > keep {
            candidates.select_nth_unstable_by(keep - 1, by_rank);
            candidates.truncate(keep);
        }
        candidates.sort_unstable_by(by_rank);

        let mut next_live = Vec::with_capacity(keep);
        for c in candidates.drain(..) {
            let mut tokens = Vec::with_capacity(live[c.parent].tokens.len() + 1);
            tokens.extend_from_slice(&live[c.parent].tokens);
            tokens.push(c.token);
            let hyp = Hypothesis {
                tokens,
                base_logprob: c.base,
                reward_total: c.reward,
                finished: c.token == EOS_ID,
            };
            if hyp.finished {
                pool.push(hyp);
            } else {
                next_live.push(hyp);
            }
        }
        live = next_live;
    }
    pool.extend(live);

    if pool.is_empty() {
        return Err(DecodeError::NoHypothesis);
    }
    pool.sort_by(|a, b| b.normalized_score().total_cmp(&a.normalized_score()));
    Ok(DecodeResult { nbest: pool })
}
