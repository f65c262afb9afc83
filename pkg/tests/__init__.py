"""Tests for fieldcover.""" 