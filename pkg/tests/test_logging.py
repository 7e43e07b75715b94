"""
Tests for logging configuration and run context.
"""

import json
import logging


class TestRunContext:
    def test_generate_run_id_is_short_and_unique(self):
        from app.core.logging import generate_run_id

        ids = {generate_run_id() for _ in range(50)}
        assert len(ids) == 50
        assert all(len(i) == 8 for i in ids)

    def test_json_formatter_includes_run_context(self):
        from app.core.logging import ProductionJsonFormatter, set_run_context

        set_run_context(experiment_id="bounds", run_id="deadbeef")
        record = logging.LogRecord(
            "app.test", logging.INFO, __file__, 10, "hello %s", ("world",), None
        )
        payload = json.loads(ProductionJsonFormatter().format(record))

        assert payload["message"] == "hello world"
        assert payload["experiment_id"] == "bounds"
        assert payload["run_id"] == "deadbeef"
        assert payload["level"] == "INFO"
        assert payload["service"] == "Euler-Helfrich Toolkit"

    def test_setup_logging_writes_to_stderr(self):
        import sys

        from app.core.logging import setup_logging

        setup_logging(log_level="WARNING", json_format=True)
        handlers = logging.getLogger().handlers

        assert logging.getLogger().level == logging.WARNING
        assert any(getattr(h, "stream", None) is sys.stderr for h in handlers)

        setup_logging(log_level="INFO", json_format=False)
