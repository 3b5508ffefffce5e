use lowrand::formats::{game_from_json, game_to_json};
use lowrand::game::example_games;
use lowrand::Rational;

#[test]
fn shipped_game_files_match_registry() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    for g in example_games::<Rational>() {
        let text = std::fs::read_to_string(format!("{dir}/{}.json", g.name())).unwrap();
        assert_eq!(game_from_json::<Rational>(&text).unwrap(), g);
        assert_eq!(text.trim_end(), game_to_json(&g));
    }
}

#[test]
fn player_count_must_agree() {
    let text = r#"{"players":3,"actions":[["a"],["b"]],"payoffs":[[["1","1"]]]}"#;
    assert!(game_from_json::<Rational>(text).is_err());
}
