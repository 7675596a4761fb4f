"""Command-line shell: corpus tools, model training, batch composition, service."""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import codec, corpus, emotion, ngram, persist, session as sess, smf, story
from .errors import StoryComposerError, TooShort
from .search import ScorerBundle
from .session import SessionConfig
from .vocab import vocab_table


@click.group(context_settings={"auto_envvar_prefix": "COMPOSER"})
def main():
    """Emotion-steered symbolic music composition."""


@main.command()
def vocab():
    """Print the token name <-> id table."""
    click.echo(vocab_table(), nl=False)


def _midi_files(directory: Path) -> list[Path]:
    return sorted(p for p in directory.rglob("*") if p.suffix.lower() in (".mid", ".midi"))


def _require_dir(path: Path) -> None:
    if not path.is_dir():
        click.echo(f"error: not a directory: {path}", err=True)
        sys.exit(2)


@main.group("corpus")
def corpus_group():
    """Dataset construction and augmentation."""


@corpus_group.command("extract-piano")
@click.argument("input_dir", type=click.Path(path_type=Path))
@click.argument("output_dir", type=click.Path(path_type=Path))
@click.option("--timestep-rate", default=4, show_default=True)
def corpus_extract_piano(input_dir: Path, output_dir: Path, timestep_rate: int):
    """Keep only piano-family tracks of each MIDI file."""
    _require_dir(input_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    kept = skipped = 0
    for path in _midi_files(input_dir):
        result = corpus.extract_piano_tracks(path.read_bytes())
        if result is None:
            skipped += 1
            continue
        (output_dir / path.name).write_bytes(result)
        kept += 1
    click.echo(f"kept {kept} files, skipped {skipped} without piano tracks")


@corpus_group.command("dedup")
@click.argument("input_dir", type=click.Path(path_type=Path))
@click.argument("manifest_path", type=click.Path(path_type=Path))
@click.option("--timestep-rate", default=4, show_default=True)
def corpus_dedup(input_dir: Path, manifest_path: Path, timestep_rate: int):
    """Write a dedup manifest (md5, bytes, path) for a MIDI directory."""
    _require_dir(input_dir)
    files = [(str(p.relative_to(input_dir)), p.read_bytes()) for p in _midi_files(input_dir)]
    manifest = corpus.dedup(files)
    corpus.count_tokens(manifest, dict(files), timestep_rate)
    manifest_path.write_text(manifest.to_text(), encoding="utf-8")
    click.echo(
        f"{manifest.piece_count} unique of {len(files)} files, {manifest.token_count} tokens"
    )


@corpus_group.command("augment")
@click.argument("input_dir", type=click.Path(path_type=Path))
@click.argument("output_dir", type=click.Path(path_type=Path))
@click.option("--timestep-rate", default=4, show_default=True)
def corpus_augment(input_dir: Path, output_dir: Path, timestep_rate: int):
    """Write the 108 variants of every input piece."""
    _require_dir(input_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    total = 0
    for path in _midi_files(input_dir):
        piece = smf.parse_midi(path.read_bytes(), timestep_rate)
        if not piece.notes:
            continue
        for i, variant in enumerate(corpus.augment(piece)):
            (output_dir / f"{path.stem}.aug{i:03d}.mid").write_bytes(smf.write_midi(variant))
            total += 1
    click.echo(f"wrote {total} augmented files")


@corpus_group.command("slice")
@click.argument("input_dir", type=click.Path(path_type=Path))
@click.argument("labels_csv", type=click.Path(path_type=Path))
@click.argument("output_dir", type=click.Path(path_type=Path))
@click.option("--timestep-rate", default=4, show_default=True)
def corpus_slice(input_dir: Path, labels_csv: Path, output_dir: Path, timestep_rate: int):
    """Slice labeled pieces into 2/4/8/16 equal parts, inheriting labels."""
    _require_dir(input_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    rows = corpus.parse_label_csv(labels_csv.read_text(encoding="utf-8"))
    out_rows = ["path,valence,arousal"]
    total = 0
    for rel, valence, arousal in rows:
        piece = smf.parse_midi((input_dir / rel).read_bytes(), timestep_rate)
        labeled = corpus.LabeledPiece(piece=piece, valence=valence, arousal=arousal, source_id=rel)
        for parts in (2, 4, 8, 16):
            try:
                slices = corpus.slice_piece(labeled, parts)
            except TooShort:
                continue
            for i, item in enumerate(slices):
                name = f"{Path(rel).stem}.s{parts}.{i:02d}.mid"
                (output_dir / name).write_bytes(smf.write_midi(item.piece))
                out_rows.append(f"{name},{valence},{arousal}")
                total += 1
    (output_dir / "labels.csv").write_text("\n".join(out_rows) + "\n", encoding="utf-8")
    click.echo(f"wrote {total} slices")


@main.group("train")
def train_group():
    """Train the desk-scale models."""


@train_group.command("lm")
@click.argument("input_dir", type=click.Path(path_type=Path))
@click.argument("model_path", type=click.Path(path_type=Path))
@click.option("--order", default=4, show_default=True)
@click.option("--alpha", default=0.01, show_default=True)
@click.option("--timestep-rate", default=4, show_default=True)
def train_lm_cmd(input_dir: Path, model_path: Path, order: int, alpha: float, timestep_rate: int):
    """Train the n-gram language model on a MIDI directory."""
    _require_dir(input_dir)
    seqs = [
        codec.encode(smf.parse_midi(p.read_bytes(), timestep_rate)) for p in _midi_files(input_dir)
    ]
    seqs = [s for s in seqs if len(s) > 1]
    if not seqs:
        click.echo(f"error: no usable MIDI files in {input_dir}", err=True)
        sys.exit(2)
    lm = ngram.train_lm(seqs, order=order, alpha=alpha)
    model_path.write_text(persist.dump_lm(lm), encoding="utf-8")
    perplexities = [lm.perplexity(s) for s in seqs]
    click.echo(
        f"trained order-{order} model on {len(seqs)} pieces; "
        f"mean training perplexity {float(np.mean(perplexities)):.2f}"
    )


@train_group.command("music-emotion")
@click.argument("input_dir", type=click.Path(path_type=Path))
@click.argument("labels_csv", type=click.Path(path_type=Path))
@click.argument("model_prefix", type=click.Path(path_type=Path))
@click.option("--timestep-rate", default=4, show_default=True)
@click.option("--holdout", default=0.2, show_default=True)
def train_music_emotion(
    input_dir: Path, labels_csv: Path, model_prefix: Path, timestep_rate: int, holdout: float
):
    """Train valence and arousal scorers; writes <prefix>.valence/.arousal."""
    _require_dir(input_dir)
    rows = corpus.parse_label_csv(labels_csv.read_text(encoding="utf-8"))
    examples: list[tuple[tuple[int, ...], int, int]] = []
    for rel, valence, arousal in rows:
        piece = smf.parse_midi((input_dir / rel).read_bytes(), timestep_rate)
        labeled = corpus.LabeledPiece(piece=piece, valence=valence, arousal=arousal)
        items = [labeled]
        for parts in (2, 4, 8, 16):
            try:
                items.extend(corpus.slice_piece(labeled, parts))
            except TooShort:
                pass
        for item in items:
            examples.append((codec.encode(item.piece), item.valence, item.arousal))
    if not examples:
        click.echo("error: no labeled examples", err=True)
        sys.exit(2)
    rng = np.random.default_rng(0)
    order = rng.permutation(len(examples))
    n_test = max(1, int(len(examples) * holdout))
    test_idx = set(order[:n_test].tolist())
    for dimension, col in (("valence", 1), ("arousal", 2)):
        train = [(examples[i][0], examples[i][col]) for i in range(len(examples)) if i not in test_idx]
        test = [(examples[i][0], examples[i][col]) for i in sorted(test_idx)]
        scorer = emotion.train_emotion_scorer(train, dimension=dimension)
        hits = sum((scorer.score(seq) >= 0.5) == bool(label) for seq, label in test)
        path = Path(f"{model_prefix}.{dimension}")
        path.write_text(persist.dump_emotion_scorer(scorer), encoding="utf-8")
        click.echo(f"{dimension}: held-out accuracy {hits / len(test):.2%} ({len(train)} train)")


@train_group.command("story")
@click.argument("sentences_csv", type=click.Path(path_type=Path))
@click.argument("model_path", type=click.Path(path_type=Path))
@click.option("--holdout", default=0.2, show_default=True)
def train_story(sentences_csv: Path, model_path: Path, holdout: float):
    """Train the sentence emotion classifier from a text,label CSV."""
    if not sentences_csv.is_file():
        click.echo(f"error: no such file: {sentences_csv}", err=True)
        sys.exit(2)
    rows = story.parse_story_csv(sentences_csv.read_text(encoding="utf-8"))
    rng = np.random.default_rng(0)
    order = rng.permutation(len(rows))
    n_test = max(1, int(len(rows) * holdout)) if len(rows) >= 10 else 0
    test_idx = set(order[:n_test].tolist())
    train = [rows[i] for i in range(len(rows)) if i not in test_idx]
    test = [rows[i] for i in sorted(test_idx)]
    clf = story.train_story_classifier(train)
    model_path.write_text(persist.dump_story_classifier(clf), encoding="utf-8")
    if test:
        hits_v = hits_a = 0
        for text, label in test:
            v, a = story.map_emotion(label)
            pv, pa, _ = clf.classify(text)
            hits_v += pv == v
            hits_a += pa == a
        click.echo(
            f"held-out accuracy: valence {hits_v / len(test):.2%}, arousal {hits_a / len(test):.2%}"
        )
    else:
        click.echo(f"trained on all {len(train)} sentences (too few for a holdout)")


def _load_bundle(lm_path: Path, valence_path: Path, arousal_path: Path) -> ScorerBundle:
    return ScorerBundle(
        lm=persist.load_lm(lm_path.read_text(encoding="utf-8")),
        valence_scorer=persist.load_emotion_scorer(valence_path.read_text(encoding="utf-8")),
        arousal_scorer=persist.load_emotion_scorer(arousal_path.read_text(encoding="utf-8")),
    )


@main.command("compose")
@click.argument("transcript", type=click.Path(path_type=Path))
@click.argument("output_midi", type=click.Path(path_type=Path))
@click.option("--lm", "lm_path", required=True, type=click.Path(path_type=Path))
@click.option("--valence-scorer", required=True, type=click.Path(path_type=Path))
@click.option("--arousal-scorer", required=True, type=click.Path(path_type=Path))
@click.option("--story-model", required=True, type=click.Path(path_type=Path))
@click.option("--library", "library_path", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=None, type=int, help="fix the session RNG for reproducibility")
@click.option("--beam-size", default=4, show_default=True)
@click.option("--expansion-k", default=16, show_default=True)
@click.option("--timestep-rate", default=4, show_default=True)
@click.option("--sentence-seconds", default=sess.DEFAULT_SENTENCE_SECONDS, show_default=True)
@click.option("--max-new-tokens", default=2048, show_default=True)
def compose(
    transcript: Path,
    output_midi: Path,
    lm_path: Path,
    valence_scorer: Path,
    arousal_scorer: Path,
    story_model: Path,
    library_path: Path,
    seed: int | None,
    beam_size: int,
    expansion_k: int,
    timestep_rate: int,
    sentence_seconds: float,
    max_new_tokens: int,
):
    """Run a whole session over a transcript (one sentence per line,
    optional tab-separated duration in seconds); writes MIDI + sidecar log."""
    try:
        bundle = _load_bundle(lm_path, valence_scorer, arousal_scorer)
        clf = persist.load_story_classifier(story_model.read_text(encoding="utf-8"))
        library = persist.load_seed_library(library_path.read_text(encoding="utf-8"))
    except (OSError, StoryComposerError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if not transcript.is_file():
        click.echo(f"error: no such transcript: {transcript}", err=True)
        sys.exit(2)
    config = SessionConfig(
        beam_size=beam_size,
        expansion_k=expansion_k,
        timestep_rate=timestep_rate,
        sentence_seconds=sentence_seconds,
        max_new_tokens=max_new_tokens,
        rng_seed=seed,
    )
    state = sess.new_session(bundle, clf, library, config)
    for line in transcript.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if "\t" in line:
            text, seconds = line.rsplit("\t", 1)
            record = sess.process_sentence(state, text, float(seconds))
        else:
            record = sess.process_sentence(state, line)
        click.echo(
            f"[{record.label}] reseeded={int(record.reseeded)} "
            f"short={int(record.short)} {record.seconds:.2f}s  {record.text}"
        )
    output_midi.write_bytes(sess.export_piece(state))
    log_path = output_midi.with_suffix(output_midi.suffix + ".log")
    log_path.write_text(sess.session_log_text(state), encoding="utf-8")
    click.echo(f"wrote {output_midi} and {log_path}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--lm", "lm_path", required=True, type=click.Path(path_type=Path))
@click.option("--valence-scorer", required=True, type=click.Path(path_type=Path))
@click.option("--arousal-scorer", required=True, type=click.Path(path_type=Path))
@click.option("--story-model", required=True, type=click.Path(path_type=Path))
@click.option("--library", "library_path", required=True, type=click.Path(path_type=Path))
@click.option("--beam-size", default=4, show_default=True)
@click.option("--expansion-k", default=16, show_default=True)
@click.option("--timestep-rate", default=4, show_default=True)
@click.option("--sentence-seconds", default=sess.DEFAULT_SENTENCE_SECONDS, show_default=True)
@click.option("--fixed-seed", default=None, type=int, help="pin every session RNG (CI mode)")
def serve(
    host: str,
    port: int,
    lm_path: Path,
    valence_scorer: Path,
    arousal_scorer: Path,
    story_model: Path,
    library_path: Path,
    beam_size: int,
    expansion_k: int,
    timestep_rate: int,
    sentence_seconds: float,
    fixed_seed: int | None,
):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    try:
        bundle = _load_bundle(lm_path, valence_scorer, arousal_scorer)
        clf = persist.load_story_classifier(story_model.read_text(encoding="utf-8"))
        library = persist.load_seed_library(library_path.read_text(encoding="utf-8"))
    except (OSError, StoryComposerError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    defaults = SessionConfig(
        beam_size=beam_size,
        expansion_k=expansion_k,
        timestep_rate=timestep_rate,
        sentence_seconds=sentence_seconds,
    )
    app = create_app(bundle, clf, library, defaults, fixed_rng_seed=fixed_seed)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
