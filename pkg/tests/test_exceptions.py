import json

from painleve_gap.exceptions import (
    NewtonDiverged,
    NumericError,
    PainleveGapException,
    StepFailure,
    TailTooLarge,
)


def test_to_dict_is_json():
    error = StepFailure("stopped", last_x=-3.5, interval=(0.0, 1.0))
    payload = error.to_dict()
    assert payload == {
        "error": "StepFailure",
        "message": "stopped",
        "details": {"last_x": -3.5, "interval": "(0.0, 1.0)"},
    }
    json.dumps(payload)


def test_attributes():
    assert NewtonDiverged("failed", residual=0.1).residual == 0.1
    assert TailTooLarge("tail", tail=1e-3).tail == 1e-3
    assert isinstance(TailTooLarge("tail", tail=1e-3), PainleveGapException)
    assert str(NewtonDiverged("failed")) == "failed"


def test_numeric_error_keeps_cause():
    error = NumericError("array must not contain infs or NaNs", "ValueError")
    assert error.cause == "ValueError"
    assert error.to_dict()["details"] == {"cause": "ValueError"}
    assert isinstance(error, PainleveGapException)
