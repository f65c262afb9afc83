"""Integration tests for fieldcover.""" 