use argbind::scoring::PredictedAnswer;

/// Reads a yes/no answer off the first line of a generation: the first word
/// after leading whitespace and punctuation, case-insensitively, must be
/// exactly "yes" or "no".
pub fn parse_model_answer(generation: &str) -> PredictedAnswer {
    let first = generation.trim_start().lines().next().unwrap_or("");
    let rest = first.trim_start_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation());
    let word: String = rest.chars().take_while(|c| c.is_alphanumeric()).collect();
    match word.to_lowercase().as_str() {
        "yes" => PredictedAnswer::Yes,
        "no" => PredictedAnswer::No,
        _ => PredictedAnswer::Unparseable,
    }
}
