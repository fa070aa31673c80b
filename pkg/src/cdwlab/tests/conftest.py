"""Shared fixtures."""

import pytest


@pytest.fixture
def isolated_home(tmp_path, monkeypatch):
    """隔离用户配置：HOME 指向临时目录并清除 CDWLAB_CONFIG"""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.delenv("CDWLAB_CONFIG", raising=False)
    return home
