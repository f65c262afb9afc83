"""Unit tests for the fieldcover configuration package.""" 