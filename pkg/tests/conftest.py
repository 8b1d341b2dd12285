import json

import pytest

from helpers import write_wav

_acceptance_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_results:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, outcome in _acceptance_results:
            verdict = "PASS" if outcome == "passed" else "FAIL"
            terminalreporter.write_line(f"  {verdict}  {name}")


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Two-recording dataset on disk: WAVs, transcripts, annotations, manifest."""
    root = tmp_path_factory.mktemp("corpus")

    write_wav(root / "lec01.wav", 29.5, rate=16000, silent_spans=[(20.0, 29.5)])
    words = []
    for t in range(20):  # one word per second over the speech region
        words.append({"w": f"word{t}", "s": t + 0.2, "e": t + 0.7})
    words.append({"w": "bridge", "s": 9.8, "e": 10.3})  # straddles a frame boundary
    (root / "lec01.words.json").write_text(json.dumps(words))
    (root / "lec01.csv").write_text("0,10,Theory\n10,20,Exercise\n20,29.5,Pause\n")

    write_wav(root / "lec02.wav", 20.0, rate=22050, channels=2, freq=330.0)
    vtt = ["WEBVTT", ""]
    for c in range(10):  # 2 s cues, 4 words each
        vtt.append(f"00:00:{2 * c:02d}.000 --> 00:00:{2 * c + 2:02d}.000")
        vtt.append(f"alpha{c} beta{c} gamma{c} delta{c}")
        vtt.append("")
    (root / "lec02.vtt").write_text("\n".join(vtt))
    (root / "lec02.csv").write_text("0,8,Exercise\n8,20,Theory\n")

    manifest = {
        "root": ".",
        "entries": [
            {
                "id": "lec01",
                "audio_path": "lec01.wav",
                "transcript_path": "lec01.words.json",
                "annotation_path": "lec01.csv",
                "meta": {"course": "Electronics", "revised_transcript": True},
            },
            {
                "id": "lec02",
                "audio_path": "lec02.wav",
                "transcript_path": "lec02.vtt",
                "annotation_path": "lec02.csv",
                "meta": {"course": "Mathematics", "revised_transcript": False},
            },
        ],
    }
    (root / "manifest.json").write_text(json.dumps(manifest))
    return root
