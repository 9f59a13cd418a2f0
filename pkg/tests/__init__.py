"""
测试模块
包含各模块的单元测试、性质测试和命令行端到端测试
"""
