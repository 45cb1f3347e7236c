//! Browser processes, one listing per browser and mode, exactly as published.
//! Repairs are applied separately by the scenario builder.

pub const SEB: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{cert[0]=id;cert[1]=pk;
                                         cert[2]=sk} ->
            Check_Certificate ->
            if (rev==revo) {{finishTLS=false} -> Skip}
            else {
                if (CertificateIsValid) {{finishTLS=true}->Skip}
                else {  {finishTLS=false} -> Skip }
            };
            if (!finishTLS)
             //The browser informs the server about Abort (sync)
             {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data -> Skip
            };
            Browser();
"#;

pub const FIREFOX_CLASSIC: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{extendedcert[0]=cert[0]=id;
                                         extendedcert[1]=cert[1]=pk;
                                         extendedcert[2]=cert[2]=sk;
                                         extendedcert[3]=url;
                                         extendedcert[4]=exp} -> 
            Check_Certificate ->
            ifa (CertificateIsValid ) {{finishTLS=true} -> Skip}
            else {
                ifa (URLhasHSTSpolicy || rev==revo) 
                   {{finishTLS=false} -> Skip}
                else {
                    ifa (CertificateIsStored) 
                       {{finishTLS=true} -> Skip}								
                    else {
                        DisplayWarning ->
                        ui!Warning{user_warned=true} ->
                        ui?userchoice ->
                        tau{
                            if (userchoice == Abort) 
                              {finishTLS=false}
                            else {
                                finishTLS=true;
                                if (userchoice == StoreCertificate) 
                                  {ServerCert.Add(extendedcert);} 
                                  //associates a url to 
                                  //the server certificate
                            }
                        } -> Skip
                    }
                }
            };
            ifa (!finishTLS)
             //The browser informs the server about Abort (sync)
              {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data ->
                Check_Header ->
                ifa (header==HSTS && CertificateIsValid) 
                   {StoreHSTSpolicy->
                    {dynamicHSTSList.Add(cert[0])} -> Skip}	 
            };
            Browser();
"#;

pub const FIREFOX_PRIVATE: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{extendedcert[0]=cert[0]=id;
                                         extendedcert[1]=cert[1]=pk;
                                         extendedcert[2]=cert[2]=sk;
                                         extendedcert[3]=url;
                                         extendedcert[4]=exp} ->
            Check_Certificate ->
            if (CertificateIsValid) {{finishTLS=true} -> Skip}
            else {
                if (URLhasHSTSpolicy || rev==revo) 
                  {{finishTLS=false} -> Skip}
                else {
                    if (CertificateIsStored) 
                      {{finishTLS=true} -> Skip}								
                    else {
                        DisplayWarning ->
                        ui!Warning{user_warned=true} ->
                        ui?userchoice ->
                        tau{
                            if (userchoice == Abort) 
                              {finishTLS=false}
                            else {
                                finishTLS=true;                                
                            }
                        } -> Skip
                    }
                }
            };
            if (!finishTLS)
            //The browser informs the server about Abort (sync)
            {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data -> Skip
            };
            Browser();
"#;

pub const CHROME_CLASSIC: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;expc=exp} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{cert[0]=id;cert[1]=pk;
                                         cert[2]=sk} ->
            Check_Certificate ->
            if (CertificateIsValid) {{finishTLS=true} -> Skip}
            else {
                if (URLhasHSTSpolicy || rev==revo) 
                  {{finishTLS=false} -> Skip}
                else {
                    DisplayWarning ->
                    ui!Warning{user_warned=true} ->
                    ui?userchoice ->
                    tau{
                        if (userchoice == Abort) 
                          {finishTLS=false}
                        else {	finishTLS=true; }
                    } -> Skip
                }
            };
            if (!finishTLS)
             //The browser informs the server about Abort (sync)
              {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data ->
                Check_Header ->
                if (header==HSTS && CertificateIsValid)
                  {StoreHSTSpolicy->
                   {dynamicHSTSList.Add(cert[0])} -> Skip}	
            };
            Browser();
"#;

pub const CHROME_PRIVATE: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;expc=exp} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{cert[0]=id;cert[1]=pk;
                                         cert[2]=sk} ->
            Check_Certificate ->
            if (CertificateIsValid) {{finishTLS=true} -> Skip}
            else {
                if (URLhasHSTSpolicy || rev==revo) 
                  {{finishTLS=false} -> Skip}
                else {
                    DisplayWarning ->
                    ui!Warning{user_warned=true} ->
                    ui?userchoice ->
                    tau{
                        if (userchoice == Abort) 
                          {finishTLS=false}
                        else {	finishTLS=true; }
                    } -> Skip
                }
            };
            if (!finishTLS)
             //The browser informs the server about Abort (sync)
              {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data -> Skip
            };
            Browser();
"#;

pub const SAFARI_CLASSIC: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
            user_warned=false;} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{extendedcert[0]=cert[0]=id;
                                         extendedcert[1]=cert[1]=pk;
                                         extendedcert[2]=cert[2]=sk;
                                         extendedcert[3]=url;
                                         extendedcert[4]=exp;
                                         extendedcert[5]=rev} ->
            Check_Certificate ->
            if (CertificateIsValidNR || CertificateIsStored) 
              {{finishTLS=true} -> Skip}
            else {
                if (URLhasHSTSpolicy || rev==revo) 
                  {{finishTLS=false} -> Skip}
                else {
                    DisplayWarning ->
                    ui!Warning{user_warned=true} ->
                    ui?userchoice ->
                    tau{
                        if (userchoice == Abort) 
                        {finishTLS=false}
                        else {
                            finishTLS=true;
                            if (userchoice == StoreCertificate) 
                              {ServerCert.Add(extendedcert);} 
                              //associates a url to 
                             //the server certificate
                        }
                    } -> Skip                    
                }
            };
            if (!finishTLS)
            //The browser informs the server about Abort (sync)
            {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data ->
                Check_Header ->
                if (header==HSTS && CertificateIsValidNR) 
                  {StoreHSTSpolicy->
                   {HSTSList.Add(cert[0])} -> Skip}	 
            };
            Browser();
"#;

pub const SAFARI_PRIVATE: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{extendedcert[0]=cert[0]=id;
                                         extendedcert[1]=cert[1]=pk;
                                         extendedcert[2]=cert[2]=sk;
                                         extendedcert[3]=url;
                                         extendedcert[4]=exp;
                                         extendedcert[5]=rev} ->
            Check_Certificate ->
            if (CertificateIsValidNR || CertificateIsStored) 
              {{finishTLS=true} -> Skip}
            else {                       
                DisplayWarning ->
                ui!Warning{user_warned=true} ->
                ui?userchoice ->
                tau{
                    if (userchoice == Abort) {finishTLS=false}
                    else {
                        finishTLS=true;
                        if (userchoice == StoreCertificate) 
                          {ServerCert.Add(extendedcert);} 
                        //associates a url to the server certificate
                    }
                } -> Skip                        
            };
            if (!finishTLS)
            //The browser informs the server about Abort for syncing
            {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data -> Skip
            };
            Browser();
"#;

pub const IE: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false; 
                       user_warned=false;expc=exp} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{cert[0]=id;cert[1]=pk;
                                         cert[2]=sk} ->
            Check_Certificate ->
            if (rev==revo) {{finishTLS=false} -> Skip}
            else {
                if (CertificateIsValid) {{finishTLS=true} -> Skip}
                else {
                   DisplayWarning ->
                   ui!Warning{user_warned=true} ->
                   ui?userchoice ->
                   tau{
                       if (userchoice == Abort) {finishTLS=false}
                       else {finishTLS=true; }
                   } -> Skip
                }
            };
            if (!finishTLS)
            //The browser informs the server about Abort (sync)
            {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data -> Skip
            };
            Browser();
"#;

pub const OPERA_MINI: &str = r#"
Browser() = []rev:{revo, norevo}@[]exp:{expi,noexpi}@
            Display_Webpage ->
            //New session, variables used in macros are reset
            ui!Webpage{finishTLS=false; intruder_server=false;
                       user_warned=false;expc=exp} ->
            ui?url ->
            Resolve_URL ->
            Init_TLS ->
            network!url.HelloClient ->
            network?HelloServer.id.pk.sk{cert[0]=id;cert[1]=pk;
                                         cert[2]=sk} ->
            Check_Certificate ->
            if (rev==revo) {{finishTLS=false} -> Skip}
            else {{finishTLS=true} -> Skip};
            if (!finishTLS)
            //The browser informs the server about Abort (sync)
            {network!Abort -> Skip}
            else {
                Finish_TLS ->
                network!ClientFinished ->
                Process_DATA ->
                network?ServerFinished.header.Data ->
                Display_Webpage ->
                ui!Data -> Skip
            };
            Browser();
"#;
