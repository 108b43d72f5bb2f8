# tests 패키지
