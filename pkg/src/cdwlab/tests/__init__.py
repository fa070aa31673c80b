# cdwlab 测试模块
