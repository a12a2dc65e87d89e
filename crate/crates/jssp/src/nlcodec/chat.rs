//! Chat-record assembly: the system/user/assistant triple a training or
//! evaluation example is made of.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{emit_problem_nl, emit_solution_nl, CodecError, NlStyle};
use crate::core::{JsspInstance, Schedule};

pub const SYSTEM_PROMPT: &str = "You are an expert in Job Shop Scheduling Problem";

/// Instruction phrasings prepended to the problem text. Index 0 is the one
/// used at evaluation time.
pub const PROMPT_VARIANTS: [&str; 3] = [
    "Instruct: Provide a solution schedule for the JSSP problem below, also indicate the \
     makespan.",
    "Task: Provide the steps of a solution for the JSSP problem and determine the makespan.",
    "Command: Give a detailed solution to tackle the JSSP problem, focusing on optimizing the \
     makespan.",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRecord {
    pub system: String,
    pub user: String,
    pub assistant: String,
    pub style: NlStyle,
    pub prompt_variant: usize,
}

/// Render the user turn for a problem text: instruction, blank line, problem.
pub fn user_turn(prompt_variant: usize, problem_nl: &str) -> String {
    format!("{}\n\n{}", PROMPT_VARIANTS[prompt_variant], problem_nl)
}

/// Assemble a training record. When `prompt_variant` is None one of the
/// three phrasings is drawn uniformly from `rng`.
pub fn build_chat_record(
    instance: &JsspInstance,
    schedule: &Schedule,
    style: NlStyle,
    prompt_variant: Option<usize>,
    rng: &mut impl Rng,
) -> Result<ChatRecord, CodecError> {
    let variant = match prompt_variant {
        Some(v) if v < PROMPT_VARIANTS.len() => v,
        Some(v) => {
            return Err(CodecError::BadPromptVariant {
                variant: v,
                count: PROMPT_VARIANTS.len(),
            })
        }
        None => rng.random_range(0..PROMPT_VARIANTS.len()),
    };
    let assistant = emit_solution_nl(schedule, instance)?;
    Ok(ChatRecord {
        system: SYSTEM_PROMPT.to_string(),
        user: user_turn(variant, &emit_problem_nl(instance, style)),
        assistant,
        style,
        prompt_variant: variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::testutil::{example_3x3, example_3x3_schedule};

    #[test]
    fn fixed_variant_record() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = build_chat_record(
            &example_3x3(),
            &example_3x3_schedule(),
            NlStyle::MachineCentric,
            Some(0),
            &mut rng,
        )
        .unwrap();
        assert_eq!(rec.system, "You are an expert in Job Shop Scheduling Problem");
        assert!(rec.user.starts_with("Instruct: Provide a solution schedule"));
        assert!(rec.user.contains("\n\nOptimize schedule for 3 Jobs across 3 Machines"));
        assert!(rec.user.contains(" Machine 0 is used for the following Operations:"));
        assert!(rec.assistant.starts_with("Solution:\n\n"));
        assert!(rec
            .assistant
            .contains("Makespan:  488.0, as it is the maximum end completion time"));
        assert_eq!(rec.prompt_variant, 0);
    }

    #[test]
    fn each_variant_has_its_phrase() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let prefixes = ["Instruct: ", "Task: ", "Command: "];
        for (v, prefix) in prefixes.iter().enumerate() {
            let rec = build_chat_record(
                &example_3x3(),
                &example_3x3_schedule(),
                NlStyle::JobCentric,
                Some(v),
                &mut rng,
            )
            .unwrap();
            assert!(rec.user.starts_with(prefix));
            assert_eq!(rec.prompt_variant, v);
        }
    }

    #[test]
    fn random_variant_is_deterministic_per_seed() {
        let build = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            build_chat_record(
                &example_3x3(),
                &example_3x3_schedule(),
                NlStyle::JobCentric,
                None,
                &mut rng,
            )
            .unwrap()
            .prompt_variant
        };
        assert_eq!(build(1), build(1));
        let picked: Vec<usize> = (0..30).map(build).collect();
        assert!(picked.iter().any(|&v| v != picked[0]), "all 30 draws agree");
    }

    #[test]
    fn out_of_range_variant_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            build_chat_record(
                &example_3x3(),
                &example_3x3_schedule(),
                NlStyle::JobCentric,
                Some(3),
                &mut rng,
            ),
            Err(CodecError::BadPromptVariant {
                variant: 3,
                count: 3
            })
        );
    }
}
