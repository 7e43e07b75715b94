"""
Liveness, readiness and run-id propagation.
"""


class TestHealthEndpoints:
    def test_liveness(self, client):
        response = client.get("/api/v1/health")

        assert response.status_code == 200
        assert response.json() == {
            "status": "healthy",
            "version": "0.1.0",
            "environment": "development",
        }

    def test_readiness_smoke_tests_numerical_stack(self, client):
        response = client.get("/api/v1/health/ready")

        assert response.status_code == 200
        assert response.json() == {
            "status": "ready",
            "checks": {"numpy": "healthy", "scipy": "healthy"},
        }

    def test_run_id_header_is_echoed(self, client):
        response = client.get("/api/v1/health", headers={"X-Run-ID": "abc12345"})

        assert response.headers["X-Run-ID"] == "abc12345"

    def test_run_id_header_is_generated(self, client):
        response = client.get("/api/v1/health")

        assert len(response.headers["X-Run-ID"]) == 8
